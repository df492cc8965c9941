#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "hartogs/rng.hpp"

using hartogs::sampling::Philox4x32;
using hartogs::sampling::RngStream;

// Known-answer vectors of the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(Philox4x32::bijection({0, 0, 0, 0}, {0, 0}),
            (Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::bijection({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::bijection({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, SameCoordinatesSameSequence) {
  Philox4x32 a(42, 3, 7);
  Philox4x32 b(42, 3, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Philox, CoordinatesSeparateStreams) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t seed : {1u, 2u})
    for (std::uint64_t stream : {0u, 1u, 1u << 20})
      for (std::uint32_t chunk : {0u, 1u, 99u}) firsts.insert(Philox4x32(seed, stream, chunk).next_u64());
  EXPECT_EQ(firsts.size(), 18u);
}

TEST(Philox, UniformRangeAndMean) {
  Philox4x32 g(9, 0, 0);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = g.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Var(U) = 1/12.
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Philox, SymmetricRange) {
  Philox4x32 g(9, 0, 1);
  for (int i = 0; i < 10000; ++i) {
    const double u = g.uniform_symmetric();
    ASSERT_GE(u, -1.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RngStream, ChildrenAreDistinctAndStable) {
  const RngStream root{42, 1};
  EXPECT_EQ(root.child(3), root.child(3));
  EXPECT_NE(root.child(3), root.child(4));
  EXPECT_NE(root.child(3), root);
  EXPECT_NE(root.child(3).chunk_engine(0).next_u64(), root.child(4).chunk_engine(0).next_u64());
}
