#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

#include "hartogs/errors.hpp"
#include "hartogs/estimate.hpp"
#include "hartogs/norms.hpp"
#include "hartogs/rng.hpp"

namespace hartogs::sampling {

/// Samples per chunk. Every chunk draws from its own Philox substream and is
/// reduced in chunk order, so results never depend on the worker count.
inline constexpr std::uint64_t kChunkSize = std::uint64_t{1} << 16;

/// Fraction of draws an integrand may reject (NotDifferentiable) before the
/// estimator reports a diagnostic failure.
inline constexpr double kResampleBudget = 1e-3;

/// Workers used by chunked estimators: an explicit override if set, else
/// HARTOGS_WITNESS_THREADS, else the hardware concurrency.
std::size_t worker_count();
/// 0 restores the environment/hardware default.
void set_worker_count(std::size_t workers);

/// Uniform points in the unit ball of a norm, by rejection from the box
/// [-1, 1]^{2k} (per-coordinate disks for the max-norm, which accept always).
class BallSampler {
 public:
  explicit BallSampler(norms::NormSpec spec);

  /// Throws DiagnosticError if fewer than 1e-4 of the proposals in a
  /// 1e5-proposal window were accepted.
  void draw(Philox4x32& engine, std::span<Complex> out);

  const norms::NormSpec& spec() const { return spec_; }
  std::size_t dimension() const { return static_cast<std::size_t>(spec_.k()); }
  /// Lebesgue volume of the ball.
  double mass() const { return volume_; }

  std::uint64_t proposals() const { return proposals_; }
  std::uint64_t accepted() const { return accepted_; }
  double acceptance_rate() const;

 private:
  void note_proposal(bool accepted);

  norms::NormSpec spec_;
  double volume_;
  std::uint64_t proposals_ = 0;
  std::uint64_t accepted_ = 0;
  std::uint64_t window_proposals_ = 0;
  std::uint64_t window_accepted_ = 0;
};

/// Points t = w / N(w) with w uniform in the ball: the normalized cone
/// measure on the unit sphere of the norm. Its reference mass 2k Vol(B) is
/// the total coarea surface measure, under which the radial disintegration
///   int_B f dV = int_0^1 r^{2k-1} int_{dB} f(r t) dsigma(t) dr
/// is exact for every norm.
class ConeSampler {
 public:
  explicit ConeSampler(norms::NormSpec spec);
  void draw(Philox4x32& engine, std::span<Complex> out);
  const norms::NormSpec& spec() const { return ball_.spec(); }
  std::size_t dimension() const { return ball_.dimension(); }
  double mass() const { return 2.0 * ball_.spec().k() * ball_.mass(); }

 private:
  BallSampler ball_;
};

/// Uniform points in the box [-1, 1]^{2k} (mass 4^k).
class BoxSampler {
 public:
  explicit BoxSampler(std::size_t complex_dimension) : dimension_(complex_dimension) {}
  void draw(Philox4x32& engine, std::span<Complex> out);
  std::size_t dimension() const { return dimension_; }
  double mass() const { return std::pow(4.0, static_cast<double>(dimension_)); }

 private:
  std::size_t dimension_;
};

template <class S>
concept PointSampler = requires(S s, Philox4x32& engine, std::span<Complex> out) {
  s.draw(engine, out);
  { s.dimension() } -> std::convertible_to<std::size_t>;
  { s.mass() } -> std::convertible_to<double>;
};

ComplexVector sample_ball(const norms::NormSpec& spec, Philox4x32& engine);
ComplexVector sample_cone_boundary(const norms::NormSpec& spec, Philox4x32& engine);

/// Per-component count, mean and sum of squared deviations.
struct Moments {
  std::uint64_t count = 0;
  std::vector<double> mean;
  std::vector<double> m2;
  std::vector<char> finite;
  std::uint64_t rejected = 0;

  /// Chan et al. pairwise update; `later` covers the samples after ours.
  void merge(const Moments& later);
  /// Estimates of mass * E[x_c].
  std::vector<Estimate> estimates(double mass) const;
};

/// Streaming per-component sums for one chunk. Sums are taken relative to
/// the first sample, so a constant component has exactly zero variance.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(std::size_t components);
  void add(std::span<const double> x);
  Moments moments() const;

  std::uint64_t rejected = 0;

 private:
  std::uint64_t count_ = 0;
  std::vector<double> shift_;
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
  std::vector<char> finite_;
};

/// Runs fn(chunk_index, engine, count) for every chunk of n_samples and
/// returns the results in chunk order.
template <class Result, class ChunkFn>
std::vector<Result> map_chunks(std::uint64_t n_samples, const RngStream& rng, ChunkFn fn) {
  const std::uint64_t chunks = (n_samples + kChunkSize - 1) / kChunkSize;
  std::vector<Result> results(chunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        const std::uint64_t begin = c * kChunkSize;
        const std::uint64_t count = std::min(kChunkSize, n_samples - begin);
        Philox4x32 engine = rng.chunk_engine(c);
        results[c] = fn(c, engine, count);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };

  const std::size_t workers = std::min<std::uint64_t>(worker_count(), std::max<std::uint64_t>(chunks, 1));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Vector-valued Monte Carlo mean. `make_kernel()` is called once per chunk
/// and returns a callable `bool(Philox4x32&, std::span<double> out)` that
/// draws a point and writes `components` values; returning false rejects
/// the draw (e.g. NotDifferentiable) and a fresh one is taken. Results are
/// scaled by `mass`.
template <class KernelFactory>
std::vector<Estimate> mc_vector(std::uint64_t n_samples, const RngStream& rng, std::size_t components,
                                double mass, KernelFactory make_kernel) {
  if (n_samples < 2) throw UsageError("mc: n_samples must be >= 2");
  auto chunks = map_chunks<Moments>(
      n_samples, rng, [&](std::uint64_t, Philox4x32& engine, std::uint64_t count) {
        auto kernel = make_kernel();
        MomentAccumulator acc(components);
        std::vector<double> out(components);
        for (std::uint64_t i = 0; i < count; ++i) {
          while (!kernel(engine, std::span<double>(out))) {
            if (++acc.rejected > count / 2 + 16) {
              throw DiagnosticError("mc: integrand rejected most draws in a chunk");
            }
          }
          acc.add(out);
        }
        Moments m = acc.moments();
        m.rejected = acc.rejected;
        return m;
      });
  Moments total = std::move(chunks.front());
  for (std::size_t c = 1; c < chunks.size(); ++c) total.merge(chunks[c]);
  const double draws = static_cast<double>(n_samples + total.rejected);
  if (static_cast<double>(total.rejected) > kResampleBudget * draws) {
    throw DiagnosticError("mc: resample budget exceeded (" + std::to_string(total.rejected) + " of " +
                          std::to_string(static_cast<std::uint64_t>(draws)) + " draws rejected)");
  }
  return total.estimates(mass);
}

/// Integral of `integrand` against the sampler's reference measure
/// (Lebesgue for balls and boxes, coarea surface measure for cone samples).
/// Real integrands yield an Estimate, complex ones a ComplexEstimate.
template <PointSampler Sampler, class Integrand>
auto mc_estimate(Integrand integrand, const Sampler& sampler, std::uint64_t n_samples, const RngStream& rng) {
  using Value = std::invoke_result_t<Integrand&, std::span<const Complex>>;
  constexpr bool is_complex = std::is_same_v<std::remove_cvref_t<Value>, Complex>;
  constexpr std::size_t components = is_complex ? 2 : 1;
  auto estimates = mc_vector(n_samples, rng, components, sampler.mass(), [&] {
    return [s = sampler, point = ComplexVector(sampler.dimension()), &integrand](
               Philox4x32& engine, std::span<double> out) mutable {
      s.draw(engine, point);
      if constexpr (is_complex) {
        const Complex value = integrand(std::span<const Complex>(point));
        out[0] = value.real();
        out[1] = value.imag();
      } else {
        out[0] = static_cast<double>(integrand(std::span<const Complex>(point)));
      }
      return true;
    };
  });
  if constexpr (is_complex) {
    return ComplexEstimate{estimates[0], estimates[1]};
  } else {
    return estimates[0];
  }
}

/// Monte Carlo volume of the unit ball: 4^k times the box acceptance rate.
Estimate ball_volume_mc(const norms::NormSpec& spec, std::uint64_t n_samples, const RngStream& rng);

}  // namespace hartogs::sampling
