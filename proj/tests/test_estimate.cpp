#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "hartogs/estimate.hpp"
#include "support/generators.hpp"

using hartogs::Estimate;

namespace {

Estimate random_estimate(gen::Source& s) {
  return {s.uniform(-5.0, 5.0), s.uniform(0.01, 1.0), static_cast<std::uint64_t>(s.integer(2, 100000)), true};
}

}  // namespace

TEST(Estimate, PoolingIsAssociative) {
  gen::for_all(1000, 21, [](gen::Source& s, int) {
    const auto a = random_estimate(s);
    const auto b = random_estimate(s);
    const auto c = random_estimate(s);
    const auto left = hartogs::pool(hartogs::pool(a, b), c);
    const auto right = hartogs::pool(a, hartogs::pool(b, c));
    EXPECT_NEAR(left.value, right.value, 1e-12 * (1.0 + std::abs(left.value)));
    EXPECT_NEAR(left.std_error, right.std_error, 1e-12 * (1.0 + left.std_error));
    EXPECT_EQ(left.n_samples, right.n_samples);
  });
}

TEST(Estimate, PoolingWeightsBySampleCount) {
  const Estimate a{1.0, 0.1, 100, true};
  const Estimate b{4.0, 0.1, 300, true};
  EXPECT_DOUBLE_EQ(hartogs::pool(a, b).value, 3.25);
  EXPECT_EQ(hartogs::pool(a, b).n_samples, 400u);
}

TEST(Estimate, DeltaMethod) {
  const Estimate a{2.0, 0.1, 10, true};
  const Estimate b{4.0, 0.2, 10, true};
  const auto p = hartogs::product(a, b);
  EXPECT_DOUBLE_EQ(p.value, 8.0);
  EXPECT_NEAR(p.std_error, std::hypot(4.0 * 0.1, 2.0 * 0.2), 1e-15);
  const auto q = hartogs::quotient(a, b);
  EXPECT_DOUBLE_EQ(q.value, 0.5);
  EXPECT_NEAR(q.std_error, 0.5 * std::hypot(0.1 / 2.0, 0.2 / 4.0), 1e-15);
  const auto s = hartogs::scaled(a, -3.0);
  EXPECT_DOUBLE_EQ(s.value, -6.0);
  EXPECT_DOUBLE_EQ(s.std_error, 0.3);
}

TEST(Estimate, PoisonPropagates) {
  Estimate bad{std::numeric_limits<double>::quiet_NaN(), 0.0, 10, false};
  const Estimate good{1.0, 0.1, 10, true};
  EXPECT_FALSE(hartogs::product(bad, good).valid);
  EXPECT_FALSE(hartogs::quotient(good, bad).valid);
  EXPECT_FALSE(hartogs::pool(good, bad).valid);
  EXPECT_FALSE(hartogs::scaled(bad, 2.0).valid);
}

TEST(Estimate, ZScore) {
  EXPECT_DOUBLE_EQ(hartogs::z_score(Estimate{1.0, 0.3, 10, true}, Estimate{2.0, 0.4, 10, true}), 2.0);
  EXPECT_DOUBLE_EQ(hartogs::z_score(Estimate::exact(1.0), 1.0), 0.0);
  EXPECT_TRUE(std::isinf(hartogs::z_score(Estimate::exact(1.0), 2.0)));
}
