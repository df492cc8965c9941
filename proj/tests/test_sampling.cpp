#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "hartogs/errors.hpp"
#include "hartogs/sampling.hpp"

using namespace hartogs;
using norms::NormSpec;
using sampling::Philox4x32;
using sampling::RngStream;

namespace {

constexpr double kPi = std::numbers::pi;
const double kInf = norms::kInfinity;

// Restores the environment default when a test changes the worker count.
struct WorkerGuard {
  ~WorkerGuard() { sampling::set_worker_count(0); }
};

}  // namespace

TEST(BallSampler, StaysInsideBall) {
  for (double p : {1.0, 2.0, 3.0, kInf}) {
    const NormSpec spec(2, p);
    Philox4x32 engine(1, 0, 0);
    for (int i = 0; i < 20000; ++i) ASSERT_LT(norms::norm_eval(spec, sampling::sample_ball(spec, engine)), 1.0);
  }
}

TEST(BallSampler, MaxNormMeanIsZero) {
  const NormSpec spec(2, kInf);
  const auto re = sampling::mc_estimate([](std::span<const Complex> w) { return w[1].real(); },
                                        sampling::BallSampler(spec), 200000, {3, 0});
  EXPECT_LE(z_score(re, 0.0), 4.0);
}

TEST(BallSampler, EuclideanSecondMoment) {
  // E|w|^2 = 2k / (2k + 2) for the uniform 4-ball.
  const NormSpec spec(2, 2);
  const auto e = sampling::mc_estimate([](std::span<const Complex> w) { return std::norm(w[0]) + std::norm(w[1]); },
                                       sampling::BallSampler(spec), 400000, {3, 1});
  EXPECT_LE(z_score(scaled(e, 1.0 / norms::ball_volume(spec)), 2.0 / 3.0), 4.0);
}

TEST(BallSampler, AcceptanceRateMatchesVolumeRatio) {
  for (auto [k, p] : {std::pair{1, 1.0}, std::pair{2, 1.0}, std::pair{2, 3.0}}) {
    const NormSpec spec(k, p);
    sampling::BallSampler sampler(spec);
    Philox4x32 engine(4, 0, 0);
    ComplexVector w(static_cast<std::size_t>(k));
    for (int i = 0; i < 100000; ++i) sampler.draw(engine, w);
    const double expected = norms::ball_volume(spec) / std::pow(4.0, k);
    const double n = static_cast<double>(sampler.proposals());
    const double se = std::sqrt(expected * (1.0 - expected) / n);
    EXPECT_NEAR(sampler.acceptance_rate(), expected, 4.0 * se) << "k=" << k << " p=" << p;
  }
}

TEST(BallSampler, MaxNormAcceptsEveryProposal) {
  sampling::BallSampler sampler(NormSpec(3, kInf));
  Philox4x32 engine(4, 0, 0);
  ComplexVector w(3);
  for (int i = 0; i < 1000; ++i) sampler.draw(engine, w);
  EXPECT_EQ(sampler.acceptance_rate(), 1.0);
}

TEST(BallSampler, AcceptanceCollapseIsDiagnosed) {
  // For k = 8 and p = 1 the box acceptance is about 1e-14.
  sampling::BallSampler sampler(NormSpec(8, 1.0));
  Philox4x32 engine(4, 0, 0);
  ComplexVector w(8);
  EXPECT_THROW(sampler.draw(engine, w), DiagnosticError);
}

TEST(ConeSampler, LiesOnUnitSphere) {
  for (double p : {1.0, 2.0, 3.0, kInf}) {
    const NormSpec spec(2, p);
    Philox4x32 engine(2, 0, 0);
    for (int i = 0; i < 20000; ++i) {
      ASSERT_NEAR(norms::norm_eval(spec, sampling::sample_cone_boundary(spec, engine)), 1.0, 1e-12);
    }
  }
}

TEST(ConeSampler, CircleModulusAndAngle) {
  const NormSpec spec(1, 2);
  Philox4x32 engine(2, 0, 1);
  double mean_re = 0.0;
  double mean_im = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto t = sampling::sample_cone_boundary(spec, engine);
    ASSERT_NEAR(std::norm(t[0]), 1.0, 1e-12);
    mean_re += t[0].real() / n;
    mean_im += t[0].imag() / n;
  }
  // Uniform angle: cos and sin have mean 0 and variance 1/2.
  EXPECT_NEAR(mean_re, 0.0, 4.0 * std::sqrt(0.5 / n));
  EXPECT_NEAR(mean_im, 0.0, 4.0 * std::sqrt(0.5 / n));
}

TEST(ConeSampler, SphereCoordinatesExchangeable) {
  const NormSpec spec(2, 2);
  sampling::ConeSampler sampler(spec);
  const auto e = sampling::mc_estimate([](std::span<const Complex> t) { return std::norm(t[1]); }, sampler, 400000,
                                       {7, 0});
  EXPECT_LE(z_score(scaled(e, 1.0 / sampler.mass()), 0.5), 4.0);
}

TEST(McEstimate, ConstantHasZeroVariance) {
  const NormSpec spec(2, 2);
  const auto e = sampling::mc_estimate([](std::span<const Complex>) { return 1.0; }, sampling::BallSampler(spec),
                                       100000, {1, 0});
  EXPECT_EQ(e.value, norms::ball_volume(spec));
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(McEstimate, DiskSecondMoment) {
  // int_{|w|<1} |w|^2 dV = 2 pi int_0^1 r^3 dr = pi / 2.
  const auto e = sampling::mc_estimate([](std::span<const Complex> w) { return std::norm(w[0]); },
                                       sampling::BallSampler(NormSpec(1, 2)), 400000, {1, 1});
  EXPECT_LE(z_score(e, kPi / 2.0), 4.0);
}

TEST(McEstimate, CircleMassForEveryPower) {
  for (int nu : {1, 4, 9}) {
    const auto e = sampling::mc_estimate(
        [nu](std::span<const Complex> t) { return std::pow(std::norm(t[0]), nu); },
        sampling::ConeSampler(NormSpec(1, 2)), 100000, {1, 2});
    EXPECT_NEAR(e.value, 2.0 * kPi, 1e-9) << "nu=" << nu;
  }
}

TEST(McEstimate, ComplexIntegrand) {
  // |w|^2 + i integrates to pi/2 + i pi over the disk.
  const auto e = sampling::mc_estimate(
      [](std::span<const Complex> w) { return std::norm(w[0]) + Complex(0.0, 1.0); },
      sampling::BallSampler(NormSpec(1, 2)), 200000, {1, 3});
  EXPECT_LE(z_score(e.re, kPi / 2.0), 4.0);
  EXPECT_NEAR(e.im.value, kPi, 1e-12);
}

TEST(McEstimate, NonFiniteValuePoisons) {
  const auto e = sampling::mc_estimate(
      [](std::span<const Complex> w) {
        return w[0].real() > 0.999 ? std::numeric_limits<double>::infinity() : 1.0;
      },
      sampling::BoxSampler(1), 200000, {1, 4});
  EXPECT_FALSE(e.valid);
}

TEST(McVector, ResampleBudget) {
  const auto kernel_rejecting = [](double fraction) {
    return [fraction] {
      return [fraction](Philox4x32& engine, std::span<double> out) {
        if (engine.uniform() < fraction) return false;
        out[0] = 1.0;
        return true;
      };
    };
  };
  EXPECT_NO_THROW(sampling::mc_vector(200000, {1, 5}, 1, 1.0, kernel_rejecting(1e-4)));
  EXPECT_THROW(sampling::mc_vector(200000, {1, 5}, 1, 1.0, kernel_rejecting(1e-2)), DiagnosticError);
}

TEST(McVector, TooFewSamplesIsUsageError) {
  EXPECT_THROW(sampling::mc_estimate([](std::span<const Complex>) { return 1.0; }, sampling::BoxSampler(1), 1, {1, 0}),
               UsageError);
}

TEST(McVector, WorkerExceptionsPropagate) {
  WorkerGuard guard;
  sampling::set_worker_count(4);
  EXPECT_THROW(sampling::mc_vector(300000, {1, 6}, 1, 1.0,
                                   [] {
                                     return [](Philox4x32&, std::span<double>) -> bool {
                                       throw DomainError("boom");
                                     };
                                   }),
               DomainError);
}

TEST(Determinism, IndependentOfWorkerCount) {
  WorkerGuard guard;
  const NormSpec spec(2, 3.0);
  auto run = [&] {
    return sampling::mc_estimate([](std::span<const Complex> w) { return std::norm(w[1]) * std::abs(w[0]); },
                                 sampling::BallSampler(spec), 500000, {42, 9});
  };
  sampling::set_worker_count(1);
  const auto one = run();
  for (std::size_t workers : {2u, 3u, 8u}) {
    sampling::set_worker_count(workers);
    const auto many = run();
    EXPECT_EQ(one.value, many.value) << workers;
    EXPECT_EQ(one.std_error, many.std_error) << workers;
  }
}

TEST(Determinism, EnvironmentVariableSetsWorkers) {
  WorkerGuard guard;
  sampling::set_worker_count(0);
  setenv("HARTOGS_WITNESS_THREADS", "3", 1);
  EXPECT_EQ(sampling::worker_count(), 3u);
  unsetenv("HARTOGS_WITNESS_THREADS");
}

TEST(Moments, ChunkMergeMatchesSinglePass) {
  sampling::MomentAccumulator whole(1);
  sampling::MomentAccumulator first(1);
  sampling::MomentAccumulator second(1);
  Philox4x32 engine(3, 3, 3);
  for (int i = 0; i < 1000; ++i) {
    const double x[] = {100.0 + engine.uniform()};
    whole.add(x);
    (i < 300 ? first : second).add(x);
  }
  auto merged = first.moments();
  merged.merge(second.moments());
  const auto a = merged.estimates(1.0)[0];
  const auto b = whole.moments().estimates(1.0)[0];
  EXPECT_NEAR(a.value, b.value, 1e-12);
  EXPECT_NEAR(a.std_error, b.std_error, 1e-12);
}

// Ball moment of |w_k|^{2 nu} equals the boundary moment times
// int_0^1 r^{2k - 1 + 2 nu} dr = 1 / (2k + 2 nu).
TEST(Disintegration, BallAgainstBoundary) {
  for (double p : {1.0, 2.0, kInf}) {
    for (int k : {1, 2}) {
      for (int nu : {0, 1, 3}) {
        const NormSpec spec(k, p);
        auto f = [nu](std::span<const Complex> w) { return std::pow(std::norm(w.back()), nu); };
        const auto ball = sampling::mc_estimate(f, sampling::BallSampler(spec), 300000, {11, 1});
        const auto boundary = sampling::mc_estimate(f, sampling::ConeSampler(spec), 300000, {11, 2});
        const auto radial = scaled(boundary, 1.0 / (2.0 * k + 2.0 * nu));
        EXPECT_LE(z_score(ball, radial), 4.0) << "p=" << p << " k=" << k << " nu=" << nu;
      }
    }
  }
}
