#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "medoidjl/error.hpp"
#include "medoidjl/projection.hpp"
#include "medoidjl/rng.hpp"

namespace medoidjl {
namespace {

TEST(SampleMap, Deterministic) {
  auto a = sample_map(7, 5, 42);
  auto b = sample_map(7, 5, 42);
  EXPECT_EQ(a.entries(), b.entries());
  EXPECT_NE(a.entries(), sample_map(7, 5, 43).entries());
}

TEST(SampleMap, EntriesFollowSeededNormalStream) {
  auto g = sample_map(3, 4, 8);
  Rng rng(8);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_DOUBLE_EQ(g.entry(i, j), rng.normal() / 2.0);
    }
  }
}

TEST(SampleMap, EntryMomentsMatchScaledNormal) {
  const std::size_t t = 1000, d = 1000;
  auto g = sample_map(d, t, 2024);
  double s = 0, s2 = 0;
  for (double x : g.entries()) {
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(t * d);
  const double mean = s / n;
  EXPECT_NEAR(mean, 0.0, 0.005);
  EXPECT_NEAR((s2 / n - mean * mean) * static_cast<double>(t), 1.0, 0.01);
}

TEST(Apply, Linearity) {
  auto g = sample_map(6, 3, 1);
  auto zero = medoidjl::apply(g, Point::zeros(6));
  for (double x : zero.coords()) EXPECT_EQ(x, 0.0);
  Point p{1, 2, 3, 4, 5, 6}, q{-1, 0.5, 2, 0, 1, -3};
  std::vector<double> sum(6);
  for (int i = 0; i < 6; ++i) sum[i] = p[i] + q[i];
  auto gp = medoidjl::apply(g, p), gq = medoidjl::apply(g, q), gs = medoidjl::apply(g, Point(sum));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(gs[i], gp[i] + gq[i], 1e-12);
}

TEST(Apply, ConcentrationTailBelowLemmaBound) {
  const std::size_t t = 200;
  const Point x = Point::basis(4, 2);
  int bad = 0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    const double n = norm(medoidjl::apply(sample_map(4, t, s), x));
    if (n <= 0.5 || n >= 1.5) ++bad;
  }
  EXPECT_LE(static_cast<double>(bad) / seeds, std::exp(-0.25 * t / 8.0));
}

TEST(ApplySet, ShapesAndWeights) {
  auto g = sample_map(8, 4, 3);
  std::vector<Point> basis;
  for (int i = 0; i < 8; ++i) basis.push_back(Point::basis(8, i));
  auto img = apply_set(g, WeightedPointSet(basis));
  EXPECT_EQ(img.size(), 8u);
  EXPECT_EQ(img.dim(), 4u);
  for (auto w : img.weights()) EXPECT_EQ(w, 1u);

  auto origin = apply_set(g, WeightedPointSet({Point::zeros(8)}, {17}));
  EXPECT_EQ(origin.size(), 1u);
  EXPECT_EQ(origin.weight(0), 17u);
  EXPECT_EQ(origin.point_copy(0), Point::zeros(4));
}

TEST(ApplySet, CollidingImagesThrow) {
  auto g = GaussianMap::from_matrix(1, 2, {1.0, 0.0});
  try {
    apply_set(g, WeightedPointSet({Point{1, 0}, Point{1, 5}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicatePoint);
  }
}

TEST(MapBinary, RoundTrip) {
  auto g = sample_map(5, 3, 77);
  std::stringstream ss;
  write_map_binary(ss, g);
  EXPECT_EQ(ss.str().size(), 24u + 15u * 8u);
  auto back = read_map_binary(ss);
  EXPECT_EQ(back.entries(), g.entries());
  EXPECT_EQ(back.seed(), 77u);
  std::stringstream junk("NOTAMAP0xxxxxxxxxxxxxxxx");
  EXPECT_THROW(read_map_binary(junk), Error);
}

DimensionRecipe base_recipe(RecipeVariant v) {
  DimensionRecipe r;
  r.variant = v;
  r.eps = 0.25;
  r.z = 1;
  r.ddim = 2;
  r.k = 4;
  r.n = 1u << 16;
  r.s = 1024;
  r.alpha = 100;
  return r;
}

TEST(TargetDimension, RelaxedSmallCaseAndLinearInConstant) {
  DimensionRecipe r = base_recipe(RecipeVariant::kRelaxed);
  r.eps = 0.25;
  r.ddim = 1;
  r.k = 1;
  r.alpha = 4;
  // 16 * (log 4 + log 4 + max(1, log 1) + max(1, log log 4)) = 96
  EXPECT_EQ(target_dimension(r), 96u);
  r.c_const = 2;
  EXPECT_EQ(target_dimension(r), 192u);
}

TEST(TargetDimension, LogLogNStep) {
  auto r = base_recipe(RecipeVariant::kForAllCentersPartitions);
  r.n = std::uint64_t{1} << 16;
  const auto a = target_dimension(r);
  r.n = std::uint64_t{1} << 32;
  EXPECT_EQ(target_dimension(r) - a, 16u);  // eps^-2 (log 32 - log 16)
}

TEST(TargetDimension, CandidateMultiplicative) {
  auto r = base_recipe(RecipeVariant::kCandidateMultiplicative);
  r.eps = 0.25;
  // 16 * (log 1024 + 1 * log 4)
  EXPECT_EQ(target_dimension(r), 192u);
}

TEST(TargetDimension, FixedSolution) {
  auto r = base_recipe(RecipeVariant::kFixedSolution);
  r.z = 2;
  // 4 * 16 * log 4
  EXPECT_EQ(target_dimension(r), 128u);
}

TEST(TargetDimension, MonotoneInEveryInput) {
  for (auto v : {RecipeVariant::kForAllCentersPartitions, RecipeVariant::kRelaxed,
                 RecipeVariant::kCandidateMultiplicative, RecipeVariant::kCandidateRelaxed,
                 RecipeVariant::kFixedSolution}) {
    const auto r = base_recipe(v);
    const auto t0 = target_dimension(r);
    auto up = r;
    up.ddim = 3;
    EXPECT_GE(target_dimension(up), t0);
    up = r;
    up.k = 64;
    EXPECT_GE(target_dimension(up), t0);
    up = r;
    up.n = std::uint64_t{1} << 40;
    EXPECT_GE(target_dimension(up), t0);
    up = r;
    up.s = 1u << 20;
    EXPECT_GE(target_dimension(up), t0);
    up = r;
    up.alpha = 1e6;
    EXPECT_GE(target_dimension(up), t0);
    up = r;
    up.eps = 0.1;
    EXPECT_GE(target_dimension(up), t0);
  }
}

TEST(TargetDimension, Validation) {
  auto r = base_recipe(RecipeVariant::kRelaxed);
  r.alpha.reset();
  EXPECT_THROW(target_dimension(r), Error);
  r = base_recipe(RecipeVariant::kForAllCentersPartitions);
  r.eps = 0.6;
  EXPECT_THROW(target_dimension(r), Error);
  EXPECT_EQ(parse_recipe_variant("candidate-relaxed"), RecipeVariant::kCandidateRelaxed);
  EXPECT_THROW(parse_recipe_variant("nope"), Error);
}

}  // namespace
}  // namespace medoidjl
