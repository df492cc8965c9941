#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hartogs::sampling {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 128-bit counter is laid out as {block, chunk, stream_lo, stream_hi};
/// the 64-bit key is the seed. Every (seed, stream, chunk) triple therefore
/// owns a disjoint slice of counter space, which is what lets chunked
/// estimators reproduce bit-for-bit under any worker layout.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream_id, std::uint32_t chunk);

  /// One block of the raw bijection; exposed for known-answer tests.
  static Counter bijection(Counter counter, Key key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [-1, 1).
  double uniform_symmetric() { return 2.0 * uniform() - 1.0; }

 private:
  void refill();

  Counter counter_{};
  Key key_{};
  Counter block_{};
  int index_ = 4;
};

/// Identity of an independent random substream.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  /// Generator for one fixed-size chunk of samples within this stream.
  Philox4x32 chunk_engine(std::uint64_t chunk) const;

  /// Derived stream for a named sub-stage; distinct tags give distinct ids.
  RngStream child(std::uint64_t tag) const;

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

}  // namespace hartogs::sampling
