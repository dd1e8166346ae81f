#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "medoidjl/geometry.hpp"

namespace medoidjl {

/// rho-net of a host subset: members pairwise > rho apart, every host point
/// within <= rho of some member. Indices refer to the point set the net was
/// built on.
struct Net {
  std::vector<std::size_t> member_indices;
  std::vector<std::size_t> host_indices;
  double rho = 0.0;
};

/// Greedy net in ascending host-index order: a host point is admitted iff it
/// is farther than rho from every admitted point.
Net build_net(const WeightedPointSet& P, std::span<const std::size_t> host, double rho);
/// Host = all points of P.
Net build_net(const WeightedPointSet& P, double rho);

struct NetValidity {
  bool packing = false;
  bool covering = false;
  bool ok() const { return packing && covering; }
};
NetValidity validate_net(const Net& net, const WeightedPointSet& P);

double diameter(const WeightedPointSet& P, std::span<const std::size_t> subset);

struct PackingReport {
  std::size_t size = 0;
  double bound = 0.0;
  double ratio = 0.0;  // size / bound
  bool pass = false;
};

/// |net| <= (diam(host)/rho)^(c * ddim).
PackingReport check_packing_bound(const Net& net, const WeightedPointSet& P, double ddim, double c);

enum class DdimMethod { kExactSearch, kGreedyCover };
const char* to_string(DdimMethod m);

struct DdimEstimate {
  double value = 0.0;
  DdimMethod method = DdimMethod::kGreedyCover;
  std::size_t witness_center = 0;
  double witness_radius = 0.0;
  std::size_t witness_cover = 1;
};

struct DdimOptions {
  /// Balls with at most this many members are covered exactly (branch and
  /// bound); larger balls use greedy set cover.
  std::size_t exact_max_ball = 12;
  /// 0 = every distinct distance from each center. Otherwise radii are taken
  /// at ball-size ranks 1..16 and then geometrically (ratio 9/8) up to the
  /// full set, so large inputs stay tractable.
  std::size_t max_radii_per_center = 0;
};

/// Doubling-dimension estimate of the distinct points of P: max over centers
/// p in P and radii r of log2 of a cover of B(p,r) n P by balls of radius r/2
/// centered at points of P. Covering centers are restricted to P; this is
/// recorded in `method`. Only radii equal to a distance from p are scanned,
/// since for a fixed ball content the smallest radius is the hardest to cover.
DdimEstimate estimate_ddim(const WeightedPointSet& P, const DdimOptions& options = {});

struct LevelAssignment {
  int level = 0;
  double radius = 0.0;
  std::size_t owner = 0;
};

inline constexpr int kDefaultLevelCap = 64;

/// Ring level of p around its nearest center: r_{j+1} <= |p - c| <= r_j with
/// r_j = r0 / 2^j, taking the largest such j. A point on its center gets
/// level_cap.
LevelAssignment level_of(Coords p, const std::vector<Point>& centers, double r0,
                         int level_cap = kDefaultLevelCap);

struct SnapResult {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Nearest net member (lowest index on ties).
SnapResult snap(Coords p, const Net& net, const WeightedPointSet& P);

enum class HostRule {
  /// Level l hosts are (P u Q) inside B(c_i, r_{l - ceil(log2 1/eps)}) over all i.
  kEnlargedBalls,
  /// Level l hosts are the union over j of S_j n B(c_j, r_l), S_j the given
  /// clusters of P.
  kClusterBalls,
};

struct NetLevel {
  int level = 0;
  double radius = 0.0;
  Net net;
};

/// Nets at geometrically halving radii r_l = r0/2^l around k centers. All
/// indices refer to `universe`: the points of P followed by the points of Q
/// that are not in P.
struct NetHierarchy {
  WeightedPointSet universe;
  std::size_t num_p = 0;
  /// universe index -> index in Q, or -1.
  std::vector<std::ptrdiff_t> q_index{};
  /// universe index <- index in Q.
  std::vector<std::size_t> from_q{};
  std::vector<Point> centers{};
  double r0 = 0.0;
  double eps = 0.0;
  int ell_min = 0;
  int ell_max = 0;
  HostRule rule = HostRule::kEnlargedBalls;
  std::vector<NetLevel> levels{};  // ell_min..ell_max in order; nets may be empty

  double radius(int level) const;
  const NetLevel* find_level(int level) const;
  bool is_p(std::size_t u) const { return u < num_p; }
};

struct HierarchyOptions {
  HostRule rule = HostRule::kEnlargedBalls;
  /// Required for kClusterBalls: P index -> center slot.
  std::optional<std::vector<std::size_t>> clusters;
};

NetHierarchy build_hierarchy(const WeightedPointSet& P, const WeightedPointSet& Q,
                             const std::vector<Point>& centers, double r0, int ell_min,
                             int ell_max, double eps, const HierarchyOptions& options = {});

/// {"schema":"net-hierarchy/1", "r0", "eps", "rule", "centers", "levels":[{"level",
/// "radius", "rho", "hosts", "members"}]}
std::string hierarchy_to_json(const NetHierarchy& h);

}  // namespace medoidjl
