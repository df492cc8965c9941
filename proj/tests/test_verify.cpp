#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "hartogs/errors.hpp"
#include "hartogs/sampling.hpp"
#include "hartogs/verify.hpp"

using namespace hartogs;
using domain::DomainParams;
using norms::NormSpec;

namespace {

constexpr double kPi = std::numbers::pi;
const double kInf = norms::kInfinity;
const DomainParams kTriangle(1, 1, 1.0, 2.0, 2.0);
const forms::CutoffSpec kCutoff;

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

// gamma(nu) for the closed-form cases.
double gamma_oracle(int n2, double p, int nu) {
  if (n2 == 1 && p == 2.0) return 2.0 * kPi;
  if (n2 == 2 && p == 2.0) return 2.0 * kPi * kPi / (nu + 1.0);
  if (n2 == 2 && p == kInf) return 2.0 * (nu + 2.0) * kPi * kPi / (nu + 1.0);
  throw std::logic_error("no oracle");
}

}  // namespace

TEST(Gamma, AnalyticOracles) {
  const std::vector<int> nus{1, 2, 5, 10};
  for (auto [n2, p] : {std::pair{1, 2.0}, std::pair{2, 2.0}, std::pair{2, kInf}}) {
    const auto table = verify::gamma_table(NormSpec(n2, p), nus, 400000, {3, 1});
    for (int nu : nus) {
      const auto& e = table.at(nu);
      const double exact = gamma_oracle(n2, p, nu);
      EXPECT_LE(z_score(e.ball, exact), 4.0) << n2 << " " << p << " " << nu;
      if (n2 == 1) {
        // Every boundary sample has |t| = 1; the standard error is rounding noise.
        EXPECT_NEAR(e.surface.value, exact, 1e-9);
      } else {
        EXPECT_LE(z_score(e.surface, exact), 4.0) << n2 << " " << p << " " << nu;
      }
      EXPECT_TRUE(e.consistent);
    }
  }
}

TEST(Gamma, CircleSurfaceIsExact) {
  const auto e = verify::gamma_estimate(NormSpec(1, 2), 7, 10000, {3, 2});
  EXPECT_NEAR(e.surface.value, 2.0 * kPi, 1e-9);
}

TEST(Gamma, ConsistentForGeneralExponent) {
  const std::vector<int> nus{1, 3};
  for (double p : {1.0, 3.0}) {
    const auto table = verify::gamma_table(NormSpec(2, p), nus, 400000, {3, 3});
    for (const auto& [nu, e] : table) EXPECT_TRUE(e.consistent) << p << " " << nu;
  }
}

TEST(Gamma, EmptyOrInvalidNu) {
  EXPECT_THROW(verify::gamma_table(NormSpec(1, 2), std::vector<int>{}, 1000, {1, 1}), UsageError);
  EXPECT_THROW(verify::gamma_table(NormSpec(1, 2), std::vector<int>{0}, 1000, {1, 1}), UsageError);
}

TEST(RadialMoment, Examples) {
  const double beta0[] = {0.0};
  const auto disk = verify::lemma1_check(NormSpec(1, 2), 2, beta0, 400000, {4, 1});
  EXPECT_LE(z_score(disk.rows[0].moment, kPi / 3.0), 4.0);
  const auto ball = verify::lemma1_check(NormSpec(2, 2), 1, beta0, 400000, {4, 2});
  EXPECT_LE(z_score(ball.rows[0].moment, kPi * kPi / 6.0), 4.0);
}

TEST(RadialMoment, BetaInvariance) {
  const double betas[] = {0.0, 0.5, 1.0, 2.7};
  for (auto [n2, p] : {std::pair{1, 2.0}, std::pair{2, 2.0}, std::pair{2, kInf}, std::pair{2, 3.0}}) {
    for (int nu : {1, 5}) {
      const auto r = verify::lemma1_check(NormSpec(n2, p), nu, betas, 400000, {4, 3});
      EXPECT_TRUE(r.pass) << n2 << " " << p << " " << nu << " z=" << r.max_pairwise_z << " rel=" << r.max_relative;
    }
  }
}

TEST(WeightedMoment, TriangleOracle) {
  for (int nu : {1, 5, 10}) {
    const auto gamma = verify::gamma_estimate(NormSpec(1, 2), nu, 400000, {5, 1});
    const auto r = verify::weighted_moment_check(kTriangle, nu, gamma.ball, 400000, {5, 2});
    EXPECT_LE(z_score(r.estimate, kPi * kPi / (nu + 1.0)), 4.0) << nu;
    EXPECT_NEAR(verify::weighted_moment_closed_form(kTriangle, nu, 2.0 * kPi), kPi * kPi / (nu + 1.0), 1e-13);
  }
}

TEST(WeightedMoment, InnerDimensionTwo) {
  for (const auto& params : {DomainParams(2, 1, 1.0, 2.0, 2.0), DomainParams(2, 2, 1.5, 2.0, kInf)}) {
    for (int nu : {1, 5}) {
      const auto gamma = verify::gamma_estimate(params.norm2(), nu, 400000, {5, 3});
      const auto r = verify::weighted_moment_check(params, nu, gamma.ball, 400000, {5, 4});
      EXPECT_TRUE(r.pass) << nu << " z=" << r.z << " rel=" << r.relative;
    }
  }
}

TEST(WeightedMoment, ClosedFormDecreasing) {
  for (const auto& params : {kTriangle, DomainParams(2, 2, 1.5, 2.0, kInf)}) {
    for (int nu = 1; nu < 40; ++nu) {
      const double g = gamma_oracle(1, 2.0, nu);
      EXPECT_GT(verify::weighted_moment_closed_form(params, nu, g), verify::weighted_moment_closed_form(params, nu + 1, g));
    }
  }
}

TEST(ChiMass, Squeeze) {
  const double i1 = verify::chi_mass(kCutoff, NormSpec(1, 2));
  EXPECT_GT(i1, kPi * 0.25);
  EXPECT_LT(i1, kPi * 0.5625);
  const double i2 = verify::chi_mass(kCutoff, NormSpec(2, 2));
  const double vol = kPi * kPi / 2.0;
  EXPECT_GT(i2, vol * std::pow(0.5, 4));
  EXPECT_LT(i2, vol * std::pow(0.75, 4));
  // Cutoff pushed against 1 recovers the full volume.
  EXPECT_NEAR(verify::chi_mass(forms::CutoffSpec(0.999, 0.9999), NormSpec(1, 2)), kPi, 1e-2);
}

TEST(ChiMass, MonteCarloCrossCheck) {
  for (const auto& norm : {NormSpec(1, 2), NormSpec(2, kInf), NormSpec(2, 3.0)}) {
    const auto e = sampling::mc_estimate(
        [&](std::span<const Complex> v) {
          const double c = forms::chi(kCutoff, norms::norm_eval(norm, v));
          return c * c;
        },
        sampling::BallSampler(norm), 400000, {6, 1});
    EXPECT_LE(z_score(e, verify::chi_mass(kCutoff, norm)), 4.0);
  }
}

TEST(Constants, K1AndStability) {
  const auto euclid = verify::estimate_constants(kTriangle, kCutoff, 100000, {7, 1});
  EXPECT_DOUBLE_EQ(euclid.K1, 1.0);
  const auto maxnorm = verify::estimate_constants(DomainParams(2, 2, 1.0, kInf, kInf), kCutoff, 100000, {7, 1});
  EXPECT_NEAR(maxnorm.K1, 1.0, 1e-12);
  for (const auto& params : {kTriangle, DomainParams(1, 2, 1.0, 2.0, kInf), DomainParams(1, 1, 2.0, 2.0, 2.0),
                             DomainParams(2, 1, 1.5, 3.0, 2.0)}) {
    const double small = verify::estimate_K2(params, kCutoff, 200000, {7, 2});
    const double large = verify::estimate_K2(params, kCutoff, 400000, {7, 2});
    EXPECT_TRUE(std::isfinite(small));
    EXPECT_LT(std::abs(large / small - 1.0), 0.1);
  }
}

TEST(Constants, K2UnboundedBelowUnitExponent) {
  // For alpha < 1 the z' derivative contributes alpha rho |z'|^(alpha - 1),
  // so the sampled supremum keeps climbing as points approach z' = 0.
  const DomainParams params(1, 1, 0.5, 2.0, 2.0);
  const double small = verify::estimate_K2(params, kCutoff, 100000, {7, 4});
  const double large = verify::estimate_K2(params, kCutoff, 6400000, {7, 4});
  EXPECT_GT(large, 1.5 * small);
}

TEST(Constants, K2ForTriangle) {
  // |grad(chi o rho)| |w| = |chi'(rho)| sqrt(1 + rho^2) on the triangle.
  double expected = 0.0;
  for (int i = 1; i < 100000; ++i) {
    const double r = 0.5 + 0.25 * i / 100000.0;
    expected = std::max(expected, std::abs(forms::chi_derivative(kCutoff, r)) * std::sqrt(1.0 + r * r));
  }
  const double k2 = verify::estimate_K2(kTriangle, kCutoff, 1000000, {7, 3});
  EXPECT_LE(k2, expected * (1.0 + 1e-9));
  EXPECT_GT(k2, expected * 0.99);
}

TEST(UNorm, ClosedForm) {
  const double i_chi = verify::chi_mass(kCutoff, NormSpec(1, 2));
  EXPECT_NEAR(verify::u_norm_closed_form(kTriangle, 1, i_chi), i_chi / 6.0, 1e-15);
  for (int nu = 1; nu < 60; ++nu) {
    EXPECT_LT(verify::u_norm_closed_form(kTriangle, nu, i_chi), verify::u_norm_closed_form(kTriangle, nu + 1, i_chi));
    EXPECT_LT(verify::u_norm_closed_form(kTriangle, nu, i_chi), i_chi / 2.0);
  }
  const auto nus = range(1, 20);
  EXPECT_DOUBLE_EQ(verify::lambda_bound(kTriangle, nus, i_chi), std::sqrt(i_chi / 6.0));
}

TEST(UNorm, SweepAgreesWithClosedForm) {
  for (const auto& params : {kTriangle, DomainParams(1, 2, 1.0, 2.0, kInf), DomainParams(2, 1, 1.0, 2.0, 2.0)}) {
    const std::vector<int> nus{1, 4, 12};
    const auto gamma = verify::gamma_table(params.norm2(), nus, 1000000, {8, 1});
    const double i_chi = verify::chi_mass(kCutoff, params.norm1());
    const auto records = verify::u_norm_sweep(params, kCutoff, gamma, nus, i_chi, 1000000, {8, 2});
    for (const auto& r : records) EXPECT_TRUE(r.pass) << r.nu << " rel=" << r.relative << " z=" << r.z;
  }
}

TEST(UNorm, SingleCheckMatchesSweep) {
  const forms::FormParams fp(kTriangle, kCutoff, 3, 2.0 * kPi);
  const double i_chi = verify::chi_mass(kCutoff, NormSpec(1, 2));
  const auto r = verify::u_norm_check(fp, i_chi, 400000, {8, 3});
  EXPECT_TRUE(r.pass) << r.relative;
}

TEST(GraphNorm, BoundedAndFlat) {
  for (const auto& params : {kTriangle, DomainParams(1, 2, 1.0, 2.0, kInf)}) {
    const auto nus = range(1, 30);
    const auto gamma = verify::gamma_table(params.norm2(), nus, 200000, {9, 1});
    const double k2 = verify::estimate_K2(params, kCutoff, 200000, {9, 2});
    const auto sweep = verify::graph_norm_sweep(params, kCutoff, gamma, nus, k2, 200000, {9, 3});
    EXPECT_TRUE(sweep.bounded);
    for (const auto& r : sweep.records) {
      EXPECT_TRUE(r.within_bound) << r.nu;
      EXPECT_GT(r.dbar_sq.value, 0.0);
      EXPECT_GT(r.theta_sq.value, 0.0);
    }
    // With n2 = 2 the nu / (nu + alpha n1 + n2) profile saturates more slowly;
    // only boundedness is claimed there.
    if (params.n2() == 1) EXPECT_LE(verify::growth_ratio(sweep, 10), 1.05);
  }
}

TEST(GraphNorm, CutoffOnlyMatters) {
  // A steeper cutoff carries more derivative energy.
  const std::vector<int> nus{4};
  const auto gamma = verify::gamma_table(NormSpec(1, 2), nus, 200000, {9, 4});
  const auto wide = verify::graph_norm_sweep(kTriangle, forms::CutoffSpec(0.3, 0.8), gamma, nus, 10.0, 400000, {9, 5});
  const auto narrow = verify::graph_norm_sweep(kTriangle, forms::CutoffSpec(0.5, 0.6), gamma, nus, 10.0, 400000, {9, 5});
  EXPECT_GT(narrow.records[0].graph_sq.value, wide.records[0].graph_sq.value);
}

TEST(Gram, HermitianOrthogonalSeparated) {
  for (const auto& params : {kTriangle, DomainParams(1, 2, 1.0, 2.0, kInf)}) {
    const auto nus = range(1, 8);
    const auto gamma = verify::gamma_table(params.norm2(), nus, 200000, {10, 1});
    const double lambda = verify::lambda_bound(params, nus, verify::chi_mass(kCutoff, params.norm1()));
    const auto g = verify::gram_check(params, kCutoff, gamma, nus, lambda, 400000, {10, 2});
    EXPECT_LE(g.hermitian_defect, 1e-12);
    EXPECT_TRUE(g.offdiag_zero) << g.max_offdiag_z;
    EXPECT_TRUE(g.separated) << g.min_distance << " vs " << lambda;
    for (std::size_t i = 0; i < nus.size(); ++i) EXPECT_EQ(g.matrix[i][i].im.value, 0.0);
  }
}

TEST(Gram, RejectsDuplicateNu) {
  const std::vector<int> nus{2, 2};
  const auto gamma = verify::gamma_table(NormSpec(1, 2), std::vector<int>{2}, 1000, {10, 3});
  EXPECT_THROW(verify::gram_check(kTriangle, kCutoff, gamma, nus, 1.0, 1000, {10, 4}), UsageError);
}

TEST(Rotation, OffDiagonalKilled) {
  const double theta = std::sqrt(2.0);
  for (const auto& params : {kTriangle, DomainParams(1, 2, 1.0, 2.0, kInf), DomainParams(2, 2, 1.0, 2.0, 2.0)}) {
    for (auto [mu, nu] : {std::pair{1, 2}, std::pair{3, 7}, std::pair{4, 4}}) {
      const auto r = verify::rotation_check(params, mu, nu, theta, 200000, {11, 1});
      EXPECT_TRUE(r.pass) << mu << " " << nu << " dz=" << r.z_difference << " z=" << r.z_direct;
    }
  }
}

TEST(Witness, TriangleAllVerdicts) {
  verify::WitnessConfig config{range(1, 20), 300000, 42, {}};
  const auto r = verify::witness_report(kTriangle, kCutoff, config);
  EXPECT_TRUE(r.complete) << r.failed_stage;
  EXPECT_TRUE(r.verdicts.graph_bounded);
  EXPECT_TRUE(r.verdicts.l2_lower_bound);
  EXPECT_TRUE(r.verdicts.separated);
  EXPECT_NEAR(r.lambda * r.lambda, r.constants.I_chi / 6.0, 1e-15);
}

TEST(Witness, MaxNormSecondFactor) {
  verify::WitnessConfig config{range(1, 10), 300000, 42, {}};
  const auto r = verify::witness_report(DomainParams(1, 2, 1.0, 2.0, kInf), kCutoff, config);
  EXPECT_TRUE(r.complete);
  EXPECT_TRUE(r.verdicts.witnessed());
}

TEST(Witness, EmptyRangeIsUsageError) {
  verify::WitnessConfig config{{}, 1000, 42, {}};
  EXPECT_THROW(verify::witness_report(kTriangle, kCutoff, config), UsageError);
}

TEST(Witness, StagesUseDistinctStreams) {
  std::set<std::uint64_t> ids;
  for (auto stage : {verify::Stage::gamma, verify::Stage::constants, verify::Stage::u_norm, verify::Stage::graph,
                     verify::Stage::gram}) {
    ids.insert(verify::stage_stream(1, stage).stream_id);
  }
  EXPECT_EQ(ids.size(), 5u);
}
