#include <gtest/gtest.h>

#include <cmath>

#include "medoidjl/error.hpp"
#include "medoidjl/instances.hpp"
#include "medoidjl/rng.hpp"
#include "medoidjl/stats.hpp"

namespace medoidjl {
namespace {

TEST(ChiSquareCdf, ClosedFormValues) {
  EXPECT_EQ(chi_square_cdf_even(4, 0.0), 0.0);
  EXPECT_NEAR(chi_square_cdf_even(2, 2 * std::log(2.0)), 0.5, 1e-15);
  // t = 4: 1 - e^{-x/2}(1 + x/2)
  EXPECT_NEAR(chi_square_cdf_even(4, 3.0), 1 - std::exp(-1.5) * 2.5, 1e-15);
  EXPECT_THROW(chi_square_cdf_even(3, 1.0), Error);
}

TEST(ChiSquareCdf, AgreesWithSampledSums) {
  Rng rng(1);
  const int trials = 200000;
  int below = 0;
  for (int i = 0; i < trials; ++i) {
    double s = 0;
    for (int j = 0; j < 8; ++j) {
      const double x = rng.normal();
      s += x * x;
    }
    below += s < 6.0;
  }
  const double p = chi_square_cdf_even(8, 6.0);
  const double se = std::sqrt(p * (1 - p) / trials);
  EXPECT_NEAR(static_cast<double>(below) / trials, p, 3 * se);
}

TEST(ChiSquareLowerTail, MatchesClosedForm) {
  auto e = chi_square_lower_tail(8, 0.25, 200000, 7);
  const double p = chi_square_cdf_even(8, 8 / 1.25);
  EXPECT_NEAR(e.probability, p, 3 * e.stderr_);
  EXPECT_EQ(e.method, TailMethod::kMonteCarlo);
}

TEST(ChiSquareLowerTail, SmallEpsApproachesMedian) {
  auto e = chi_square_lower_tail(400, 1e-4, 100000, 3);
  // Pr(X < t) for large t is slightly above 1/2 (median below the mean).
  EXPECT_NEAR(e.probability, 0.5, 0.03);
  EXPECT_THROW(chi_square_lower_tail(2, 0.1, 1000, 1), Error);
  EXPECT_THROW(chi_square_lower_tail(8, 0.6, 1000, 1), Error);
}

TEST(NormDistortion, IdentityAndConcentration) {
  Rng rng(2);
  std::vector<Point> pts;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> c(20);
    for (auto& x : c) x = rng.normal();
    pts.emplace_back(std::move(c));
  }
  WeightedPointSet P(pts);
  auto id = norm_distortion_stats(P, GaussianMap::identity(20));
  EXPECT_EQ(id.pairs, 780u);
  EXPECT_NEAR(id.min, 1.0, 1e-12);
  EXPECT_NEAR(id.max, 1.0, 1e-12);
  auto s = norm_distortion_stats(P, sample_map(20, 256, 4));
  EXPECT_NEAR(s.mean, 1.0, 0.02);
  std::size_t counted = s.below + s.above;
  for (auto b : s.bins) counted += b;
  EXPECT_EQ(counted, s.pairs);
}

TEST(NormDistortion, BasisShrinksBelowOneMinusEps) {
  // With t far below log n some pair of basis vectors contracts by more than
  // eps in most draws.
  auto basis = gen_basis(256);
  int hits = 0;
  for (int s = 0; s < 20; ++s) {
    auto st = norm_distortion_stats(basis.P, sample_map(256, 4, s));
    hits += st.min < 0.75;
  }
  EXPECT_GE(hits, 18);
}

TEST(ExcessDistortion, LargeEpsAndScaleInvariance) {
  Point p{1, 2, 3}, q{-1, 0, 2};
  EXPECT_LT(expected_excess_distortion(p, q, 1, 16, 3.0, 20000, 1).mean, 1e-6);
  Point p2{2, 4, 6}, q2{-2, 0, 4};
  auto a = expected_excess_distortion(p, q, 2, 8, 0.2, 5000, 9);
  auto b = expected_excess_distortion(p2, q2, 2, 8, 0.2, 5000, 9);
  EXPECT_DOUBLE_EQ(a.mean, b.mean);
}

TEST(ExcessDistortion, DecreasesWithDimension) {
  Point p{0, 0}, q{1, 1};
  MeanEstimate prev = expected_excess_distortion(p, q, 1, 8, 0.1, 40000, 5);
  for (std::size_t t : {16u, 32u, 64u}) {
    auto cur = expected_excess_distortion(p, q, 1, t, 0.1, 40000, 5);
    EXPECT_LT(cur.mean, prev.mean + 2 * std::hypot(cur.stderr_, prev.stderr_)) << t;
    prev = cur;
  }
  auto t8 = expected_excess_distortion(p, q, 1, 8, 0.1, 40000, 5);
  EXPECT_LT(prev.mean, t8.mean);
}

}  // namespace
}  // namespace medoidjl
