#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "medoidjl/clustering.hpp"
#include "medoidjl/error.hpp"
#include "medoidjl/instances.hpp"
#include "medoidjl/rng.hpp"

namespace medoidjl {
namespace {

WeightedPointSet random_cloud(std::size_t n, std::size_t d, std::uint64_t seed, bool weights = false) {
  Rng rng(seed);
  std::vector<Point> pts;
  std::vector<std::uint64_t> w;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> c(d);
    for (auto& x : c) x = rng.normal();
    pts.emplace_back(std::move(c));
    w.push_back(weights ? 1 + rng.below(5) : 1);
  }
  return WeightedPointSet(pts, w);
}

// Direct double loop over P and C.
double brute_cost(const ClusteringInstance& inst, const std::vector<std::size_t>& C) {
  double total = 0;
  for (std::size_t p = 0; p < inst.P.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (auto c : C) best = std::min(best, powered_dist(inst.P.point(p), inst.Q.point(c), inst.z));
    total += static_cast<double>(inst.P.weight(p)) * best;
  }
  return total;
}

// Minimum of brute_cost over every k-subset (lexicographic recursion).
void brute_opt(const ClusteringInstance& inst, std::size_t from, std::vector<std::size_t>& cur,
               double& best) {
  if (cur.size() == std::min(inst.k, inst.Q.size())) {
    best = std::min(best, brute_cost(inst, cur));
    return;
  }
  for (std::size_t q = from; q < inst.Q.size(); ++q) {
    cur.push_back(q);
    brute_opt(inst, q + 1, cur, best);
    cur.pop_back();
  }
}

TEST(Cost, Basics) {
  auto single = ClusteringInstance::discrete(WeightedPointSet({Point{3, 1}}), 1, PowerExponent(1));
  EXPECT_EQ(cost(single, std::vector<std::size_t>{0}), 0.0);

  for (std::size_t n : {4u, 8u, 12u}) {
    auto b = gen_basis(n);
    std::vector<std::size_t> C{0, n / 2};
    EXPECT_NEAR(cost(b, C), (n - 2) * std::sqrt(2.0), 1e-12);
  }
}

TEST(Cost, MatchesDoubleLoop) {
  for (double z : {1.0, 2.0, 1.5}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      ClusteringInstance inst(random_cloud(8, 3, s, true), random_cloud(5, 3, s + 50), 3,
                              PowerExponent(z));
      std::vector<std::size_t> C{0, 2, 4};
      EXPECT_NEAR(cost(inst, C), brute_cost(inst, C), 1e-12 * brute_cost(inst, C));
      EXPECT_NEAR(cost(CostTable(inst), C), brute_cost(inst, C), 1e-12 * brute_cost(inst, C));
    }
  }
}

TEST(CostPartition, NearestEqualsCostAndOthersAreWorse) {
  auto inst = ClusteringInstance::discrete(random_cloud(9, 2, 7), 3, PowerExponent(2));
  std::vector<std::size_t> C{1, 4, 6};
  auto near = assign_source(inst, C);
  EXPECT_NEAR(cost_partition(inst, near, C), cost(inst, C), 1e-12);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    std::vector<std::size_t> part(9);
    for (auto& x : part) x = rng.below(3);
    EXPECT_GE(cost_partition(inst, part, C), cost(inst, C) - 1e-12);
  }
}

TEST(CostPartition, CrossedAssignment) {
  auto P = WeightedPointSet({Point{0}, Point{10}});
  auto Q = WeightedPointSet({Point{1}, Point{8}});
  ClusteringInstance inst(P, Q, 2, PowerExponent(1));
  std::vector<std::size_t> C{0, 1};
  EXPECT_DOUBLE_EQ(cost_partition(inst, std::vector<std::size_t>{1, 0}, C), 8.0 + 9.0);
}

TEST(OptExact, HandCases) {
  auto line = ClusteringInstance::discrete(
      WeightedPointSet({Point{0}, Point{1}, Point{2}}), 1, PowerExponent(1));
  auto o = opt_exact(line);
  EXPECT_EQ(o.solution.center_indices, std::vector<std::size_t>{1});
  EXPECT_DOUBLE_EQ(o.value, 2.0);
  EXPECT_TRUE(o.exact);

  auto all = ClusteringInstance::discrete(random_cloud(5, 2, 1), 5, PowerExponent(2));
  EXPECT_EQ(opt_exact(all).value, 0.0);

  for (std::size_t n = 4; n <= 12; n += 2) {
    EXPECT_NEAR(opt_exact(gen_basis(n)).value, (n - 2) * std::sqrt(2.0), 1e-12);
  }
}

TEST(OptExact, MatchesEnumerationOracle) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Rng rng(s);
    const std::size_t k = 1 + rng.below(3);
    ClusteringInstance inst(random_cloud(10, 2, s, true), random_cloud(7, 2, s + 99), k,
                            PowerExponent(s % 2 ? 2.0 : 1.0));
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> cur;
    brute_opt(inst, 0, cur, best);
    auto o = opt_exact(inst);
    EXPECT_NEAR(o.value, best, 1e-12 * best);
    EXPECT_NEAR(cost(inst, o.solution.center_indices), o.value, 1e-12 * best);
  }
}

TEST(OptExact, TiesGoToLexicographicallySmallest) {
  auto P = WeightedPointSet({Point{-1}, Point{1}});
  auto Q = WeightedPointSet({Point{5}, Point{0}, Point{0.5}, Point{-0.5}});
  ClusteringInstance inst(P, Q, 1, PowerExponent(1));  // q1, q2, q3 all cost 2
  EXPECT_EQ(opt_exact(inst).solution.center_indices, std::vector<std::size_t>{1});
}

TEST(OptExact, BudgetRefusal) {
  auto inst = ClusteringInstance::discrete(random_cloud(30, 2, 2), 5, PowerExponent(1));
  try {
    opt_exact(inst, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
  EXPECT_EQ(binomial(30, 5), 142506u);
  EXPECT_EQ(binomial(5, 7), 0u);
}

TEST(OptLocal, NeverBelowExactAndUsuallyEqual) {
  int equal = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto inst = ClusteringInstance::discrete(random_cloud(12, 2, 1000 + s), 2, PowerExponent(1));
    const double ex = opt_exact(inst).value;
    auto lo = opt_local(inst, 3, s);
    EXPECT_FALSE(lo.exact);
    EXPECT_GE(lo.value, ex - 1e-12 * ex);
    if (lo.value <= ex * (1 + 1e-12)) ++equal;
  }
  EXPECT_GE(equal, 40);
}

TEST(OptLocal, DegenerateAndDeterministic) {
  auto inst = ClusteringInstance::discrete(random_cloud(6, 2, 3), 6, PowerExponent(2));
  EXPECT_EQ(opt_local(inst, 2, 0).value, 0.0);
  auto big = ClusteringInstance::discrete(random_cloud(40, 3, 4), 4, PowerExponent(1));
  auto a = opt_local(big, 4, 9), b = opt_local(big, 4, 9);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.solution.center_indices, b.solution.center_indices);
}

TEST(OptAuto, PicksExactWhenAffordable) {
  auto inst = ClusteringInstance::discrete(random_cloud(10, 2, 5), 2, PowerExponent(1));
  EXPECT_TRUE(opt_auto(inst).exact);
  EXPECT_FALSE(opt_auto(inst, 10).exact);
}

TEST(ContinuousCenter, SymmetryAndCentroid) {
  for (double z : {1.0, 2.0}) {
    auto c = continuous_center(WeightedPointSet({Point{-2, 1}, Point{2, -1}}), PowerExponent(z));
    EXPECT_NEAR(c[0], 0.0, 1e-9);
    EXPECT_NEAR(c[1], 0.0, 1e-9);
  }
  auto c = continuous_center(WeightedPointSet({Point{0, 0}, Point{2, 0}, Point{0, 2}}),
                             PowerExponent(2));
  EXPECT_NEAR(c[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(c[1], 2.0 / 3.0, 1e-15);
  auto sq = continuous_center(
      WeightedPointSet({Point{0, 0}, Point{4, 0}, Point{0, 4}, Point{4, 4}}), PowerExponent(1));
  EXPECT_NEAR(sq[0], 2.0, 1e-9);
  EXPECT_NEAR(sq[1], 2.0, 1e-9);
}

TEST(ContinuousCenter, MedianBeatsProbes) {
  Rng rng(8);
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto P = random_cloud(15, 3, 300 + s, true);
    auto c = continuous_center(P, PowerExponent(1));
    const double base = cost_to_point(P, c, PowerExponent(1));
    for (int i = 0; i < 200; ++i) {
      std::vector<double> q(c.coords().begin(), c.coords().end());
      for (auto& x : q) x += 0.1 * rng.normal();
      EXPECT_GE(cost_to_point(P, q, PowerExponent(1)), base * (1 - 1e-12));
    }
  }
  EXPECT_THROW(continuous_center(random_cloud(4, 2, 1), PowerExponent(1.5)), Error);
}

TEST(PartitionsAtMostK, StirlingSums) {
  EXPECT_EQ(partitions_at_most_k(4, 2), 8u);   // S(4,1) + S(4,2) = 1 + 7
  EXPECT_EQ(partitions_at_most_k(5, 5), 52u);  // Bell(5)
  EXPECT_EQ(partitions_at_most_k(3, 1), 1u);
}

TEST(OptcontSmall, Cases) {
  auto P = random_cloud(6, 2, 11);
  const double one = optcont_small(P, 1, PowerExponent(2));
  EXPECT_NEAR(one, cost_to_point(P, continuous_center(P, PowerExponent(2)), PowerExponent(2)),
              1e-12);
  EXPECT_EQ(optcont_small(P, 6, PowerExponent(1)), 0.0);
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto Ps = random_cloud(6, 2, 20 + s);
    auto inst = ClusteringInstance::discrete(Ps, 2, PowerExponent(2));
    EXPECT_LE(optcont_small(Ps, 2, PowerExponent(2)), opt_exact(inst).value * (1 + 1e-12));
  }
  EXPECT_THROW(optcont_small(random_cloud(14, 2, 1), 4, PowerExponent(1), 100), Error);
}

TEST(Assign, SourceAndTarget) {
  auto inst = ClusteringInstance::discrete(random_cloud(10, 4, 12), 1, PowerExponent(1));
  std::vector<std::size_t> one{3};
  auto g = sample_map(4, 2, 5);
  EXPECT_EQ(assign_source(inst, one), assign_target(inst, one, g));

  auto inst3 = ClusteringInstance::discrete(random_cloud(20, 4, 13), 3, PowerExponent(1));
  std::vector<std::size_t> C{0, 5, 9};
  auto img = project(inst3, g);
  auto f = assign_target(inst3, C, g);
  auto src = assign_source(inst3, C);
  EXPECT_LE(cost_partition(img, f, C), cost_partition(img, src, C) + 1e-12);
}

TEST(Assign, TargetCanDisagreeWithSource) {
  // Two nearly equidistant centers; a 1-dimensional image must break some ties
  // differently for at least one seed.
  auto P = WeightedPointSet({Point{0, 0}, Point{0.01, 1}, Point{-0.02, -1}, Point{0.5, 0.5}});
  auto Q = WeightedPointSet({Point{1, 0}, Point{-1, 0}});
  ClusteringInstance inst(P, Q, 2, PowerExponent(1));
  std::vector<std::size_t> C{0, 1};
  bool differ = false;
  for (std::uint64_t s = 0; s < 100 && !differ; ++s) {
    differ = assign_source(inst, C) != assign_target(inst, C, sample_map(2, 1, s));
  }
  EXPECT_TRUE(differ);
}

}  // namespace
}  // namespace medoidjl
