#include "hartogs/rng.hpp"

#include <stdexcept>

namespace hartogs::sampling {

namespace {

constexpr std::uint32_t kMultiplier0 = 0xD2511F53;
constexpr std::uint32_t kMultiplier1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;
constexpr int kRounds = 10;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream_id, std::uint32_t chunk)
    : counter_{0u, chunk, static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)},
      key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

Philox4x32::Counter Philox4x32::bijection(Counter ctr, Key key) {
  for (int round = 0; round < kRounds; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMultiplier0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMultiplier1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

void Philox4x32::refill() {
  block_ = bijection(counter_, key_);
  if (++counter_[0] == 0) throw std::overflow_error("Philox4x32: chunk counter space exhausted");
  index_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() {
  if (index_ == 4) refill();
  return block_[index_++];
}

std::uint64_t Philox4x32::next_u64() {
  const std::uint64_t hi = (*this)();
  const std::uint64_t lo = (*this)();
  return (hi << 32) | lo;
}

double Philox4x32::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

Philox4x32 RngStream::chunk_engine(std::uint64_t chunk) const {
  if (chunk > 0xFFFFFFFFull) throw std::overflow_error("RngStream: chunk index exceeds 32 bits");
  return Philox4x32(seed, stream_id, static_cast<std::uint32_t>(chunk));
}

RngStream RngStream::child(std::uint64_t tag) const {
  return {seed, splitmix64(stream_id ^ splitmix64(tag + 1))};
}

}  // namespace hartogs::sampling
