#include <gtest/gtest.h>

#include <cmath>

#include "medoidjl/rng.hpp"

namespace medoidjl {
namespace {

// Reference outputs of SplitMix64 seeded with 0 (the published sequence).
TEST(SplitMix64, PinnedStream) {
  SplitMix64 g(0);
  EXPECT_EQ(g(), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(g(), 0x6E789E6AA1B965F4ull);
  EXPECT_EQ(g(), 0x06C45D188009454Full);
}

TEST(Rng, UniformInHalfOpenUnitInterval) {
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
  }
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng rng(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(Rng, NormalMomentsAndPairOrder) {
  Rng rng(9);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);

  // First two normals are the cos and sin halves of one Box-Muller pair.
  Rng a(17), u(17);
  const double u1 = u.uniform01(), u2 = u.uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  EXPECT_DOUBLE_EQ(a.normal(), r * std::cos(2.0 * M_PI * u2));
  EXPECT_DOUBLE_EQ(a.normal(), r * std::sin(2.0 * M_PI * u2));
}

}  // namespace
}  // namespace medoidjl
