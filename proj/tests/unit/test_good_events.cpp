#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "medoidjl/error.hpp"
#include "medoidjl/instances.hpp"
#include "medoidjl/report_json.hpp"
#include "medoidjl/rng.hpp"
#include "medoidjl/verify.hpp"

namespace medoidjl {
namespace {

ClusteringInstance cloud_instance(std::size_t n, std::size_t k, double z, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double off = 20.0 * static_cast<double>(i % k);
    pts.push_back(Point{off + rng.normal(), rng.normal(), rng.normal()});
  }
  return ClusteringInstance::discrete(WeightedPointSet(pts), k, PowerExponent(z));
}

TEST(GoodEvents, ThresholdIsDeepestHeavyLevel) {
  auto inst = cloud_instance(40, 2, 1, 3);
  GoodEventsParams params;
  params.alpha = 4;
  auto s = prepare_good_events(inst, params);
  const double r0 = s.opt.value;
  for (std::size_t i = 0; i < 2; ++i) {
    ASSERT_TRUE(s.threshold[i].has_value());
    const auto c = inst.Q.point(s.opt.solution.center_indices[i]);
    auto mass_at = [&](int l) {
      double m = 0;
      for (std::size_t p = 0; p < inst.P.size(); ++p) {
        if (s.clusters[p] == i && dist(inst.P.point(p), c) <= std::ldexp(r0, -l)) m += 1;
      }
      return m * std::ldexp(r0, -l);
    };
    const int li = *s.threshold[i];
    EXPECT_GT(mass_at(li), 4 * s.opt.value);
    for (int l = li + 1; l <= li + 20; ++l) EXPECT_LE(mass_at(l), 4 * s.opt.value);
    EXPECT_EQ(s.buffer_high(i) - li, 3);   // ceil(log2(4 * 2))
    EXPECT_EQ(li - s.buffer_low(i), 15);   // ceil(log2(2000 * 16))
  }
}

TEST(GoodEvents, BetaMatchesPairwiseScan) {
  auto inst = cloud_instance(12, 1, 1, 5);
  auto s = prepare_good_events(inst, {});
  auto g = sample_map(3, 2, 9);
  auto rep = good_events_diagnostics(s, g);
  const auto& U = s.hierarchy.universe;
  for (const auto& lvl : s.hierarchy.levels) {
    const auto& mem = lvl.net.member_indices;
    double beta = 0;
    for (auto a : mem) {
      for (auto b : mem) {
        if (a == b) continue;
        const double ratio = dist(medoidjl::apply(g, U.point(a)), medoidjl::apply(g, U.point(b))) /
                             dist(U.point(a), U.point(b));
        beta = std::max(beta, (0.75 - ratio) / 0.25);
      }
    }
    EXPECT_NEAR(rep.level_stats.at(lvl.level).first, beta, 1e-12) << lvl.level;
  }
}

TEST(GoodEvents, IdentityMapSatisfiesEveryEvent) {
  auto inst = cloud_instance(30, 2, 2, 7);
  auto s = prepare_good_events(inst, {});
  auto rep = good_events_diagnostics(s, GaussianMap::identity(3));
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.worst_load, 1.0);
  for (const auto& e : rep.events) EXPECT_TRUE(e.pass) << e.name;
  auto j = nlohmann::json::parse(good_events_to_json(rep));
  EXPECT_EQ(j["schema"], "good-events/1");
  EXPECT_EQ(j["events"].size(), rep.events.size());
}

TEST(GoodEvents, EventAShrinksWithDimension) {
  auto inst = cloud_instance(24, 2, 1, 11);
  auto s = prepare_good_events(inst, {});
  std::vector<double> mean;
  for (std::size_t t : {2u, 8u, 32u, 128u}) {
    double sum = 0;
    for (int seed = 0; seed < 20; ++seed) {
      auto rep = good_events_diagnostics(s, sample_map(3, t, seed));
      sum += rep.events[0].value;  // a.beta
    }
    mean.push_back(sum / 20);
  }
  for (std::size_t i = 1; i < mean.size(); ++i) EXPECT_LE(mean[i], mean[i - 1]) << i;
  EXPECT_LT(mean.back(), mean.front());
}

TEST(GoodEvents, ValidatesParameters) {
  auto inst = cloud_instance(10, 1, 1, 1);
  GoodEventsParams bad;
  bad.alpha = 1;
  EXPECT_THROW(prepare_good_events(inst, bad), Error);
  auto zero = ClusteringInstance::discrete(WeightedPointSet({Point{0, 0, 0}}), 1, PowerExponent(1));
  EXPECT_THROW(prepare_good_events(zero, {}), Error);
}

}  // namespace
}  // namespace medoidjl
