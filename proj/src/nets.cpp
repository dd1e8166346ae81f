#include "medoidjl/nets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace medoidjl {

Net build_net(const WeightedPointSet& P, std::span<const std::size_t> host, double rho) {
  require(rho > 0.0, ErrorCode::kInvalidArgument, "net radius rho must be > 0");
  require(!host.empty(), ErrorCode::kEmptyInput, "net host set must be nonempty");
  std::vector<std::size_t> sorted(host.begin(), host.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Net net;
  net.rho = rho;
  net.host_indices = sorted;
  const double rho2 = rho * rho;
  for (auto i : sorted) {
    require(i < P.size(), ErrorCode::kInvalidArgument, "host index out of range");
    bool far = true;
    for (auto m : net.member_indices) {
      if (squared_dist(P.point(i), P.point(m)) <= rho2) {
        far = false;
        break;
      }
    }
    if (far) net.member_indices.push_back(i);
  }
  return net;
}

Net build_net(const WeightedPointSet& P, double rho) {
  std::vector<std::size_t> all(P.size());
  std::iota(all.begin(), all.end(), 0);
  return build_net(P, all, rho);
}

NetValidity validate_net(const Net& net, const WeightedPointSet& P) {
  NetValidity v;
  v.packing = true;
  for (std::size_t a = 0; a < net.member_indices.size() && v.packing; ++a) {
    for (std::size_t b = a + 1; b < net.member_indices.size(); ++b) {
      if (!(dist(P.point(net.member_indices[a]), P.point(net.member_indices[b])) > net.rho)) {
        v.packing = false;
        break;
      }
    }
  }
  v.covering = true;
  for (auto h : net.host_indices) {
    bool covered = false;
    for (auto m : net.member_indices) {
      if (dist(P.point(h), P.point(m)) <= net.rho) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      v.covering = false;
      break;
    }
  }
  return v;
}

double diameter(const WeightedPointSet& P, std::span<const std::size_t> subset) {
  double best = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      best = std::max(best, squared_dist(P.point(subset[a]), P.point(subset[b])));
    }
  }
  return std::sqrt(best);
}

PackingReport check_packing_bound(const Net& net, const WeightedPointSet& P, double ddim, double c) {
  PackingReport r;
  r.size = net.member_indices.size();
  const double diam = diameter(P, net.host_indices);
  r.bound = diam > 0.0 ? std::pow(diam / net.rho, c * ddim) : 1.0;
  // A single point always fits, whatever the bound's base.
  r.bound = std::max(r.bound, 1.0);
  r.ratio = static_cast<double>(r.size) / r.bound;
  r.pass = static_cast<double>(r.size) <= r.bound * (1.0 + 1e-12);
  return r;
}

const char* to_string(DdimMethod m) {
  return m == DdimMethod::kExactSearch ? "exact-search" : "greedy-cover";
}

namespace {

using Bits = std::vector<std::uint64_t>;

std::size_t popcount_and(const Bits& a, const Bits& b) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) c += std::popcount(a[i] & b[i]);
  return c;
}

// Minimum number of masks whose union is `full` (full has <= 32 bits).
struct ExactCover {
  std::vector<std::uint32_t> masks;
  std::size_t best;

  void search(std::uint32_t covered, std::uint32_t full, std::size_t used) {
    if (covered == full) {
      best = std::min(best, used);
      return;
    }
    if (used + 1 >= best) return;
    const std::uint32_t missing = full & ~covered;
    const std::uint32_t low = missing & (~missing + 1);
    for (auto m : masks) {
      if (m & low) search(covered | m, full, used + 1);
    }
  }
};

std::size_t exact_cover_size(std::vector<std::uint32_t> masks, std::uint32_t full,
                             std::size_t upper) {
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  // Drop masks contained in another mask.
  std::vector<std::uint32_t> kept;
  for (auto m : masks) {
    bool dominated = false;
    for (auto o : masks) {
      if (o != m && (o & m) == m) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(m);
  }
  std::sort(kept.begin(), kept.end(),
            [](auto a, auto b) { return std::popcount(a) > std::popcount(b); });
  ExactCover ec{kept, upper};
  ec.search(0, full, 0);
  return ec.best;
}

std::vector<std::size_t> sampled_ranks(std::size_t n, std::size_t max_radii) {
  std::vector<std::size_t> ranks;
  if (max_radii == 0) {
    for (std::size_t j = 1; j < n; ++j) ranks.push_back(j);
    return ranks;
  }
  for (std::size_t j = 1; j < n && j <= 16; ++j) ranks.push_back(j);
  double size = 16.0;
  while (true) {
    size *= 9.0 / 8.0;
    auto j = static_cast<std::size_t>(std::ceil(size)) - 1;
    if (j >= n) break;
    if (ranks.empty() || j > ranks.back()) ranks.push_back(j);
  }
  if (n > 1 && ranks.back() != n - 1) ranks.push_back(n - 1);
  if (ranks.size() > max_radii) {
    std::vector<std::size_t> thinned;
    const double step = static_cast<double>(ranks.size() - 1) / static_cast<double>(max_radii - 1);
    for (std::size_t i = 0; i < max_radii; ++i) {
      thinned.push_back(ranks[static_cast<std::size_t>(std::llround(i * step))]);
    }
    thinned.erase(std::unique(thinned.begin(), thinned.end()), thinned.end());
    ranks = thinned;
  }
  return ranks;
}

}  // namespace

DdimEstimate estimate_ddim(const WeightedPointSet& P, const DdimOptions& options) {
  const std::size_t n = P.size();
  DdimEstimate est;
  est.method = DdimMethod::kExactSearch;
  if (n == 1) return est;

  std::vector<double> D(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      const double d = dist(P.point(a), P.point(b));
      D[a * n + b] = d;
      D[b * n + a] = d;
    }
  }
  // Per point, all points sorted by distance (ties by index).
  std::vector<std::vector<std::size_t>> order(n);
  for (std::size_t a = 0; a < n; ++a) {
    auto& o = order[a];
    o.resize(n);
    std::iota(o.begin(), o.end(), 0);
    std::stable_sort(o.begin(), o.end(),
                     [&](std::size_t x, std::size_t y) { return D[a * n + x] < D[a * n + y]; });
  }

  const auto ranks = sampled_ranks(n, options.max_radii_per_center);
  std::vector<std::ptrdiff_t> local(n, -1);
  std::size_t best_cover = 1;
  bool witness_exact = true;

  for (std::size_t p = 0; p < n; ++p) {
    const auto& op = order[p];
    std::size_t prev_m = 0;
    for (auto j : ranks) {
      const double r = D[p * n + op[j]];
      // Extend to all points tied at radius r (closed ball).
      std::size_t m = j + 1;
      while (m < n && D[p * n + op[m]] <= r) ++m;
      if (m == prev_m) continue;
      prev_m = m;
      if (m <= best_cover) continue;  // cannot beat the current maximum

      const double half = r / 2.0;
      for (std::size_t i = 0; i < m; ++i) local[op[i]] = static_cast<std::ptrdiff_t>(i);

      // Candidate covering centers lie within 1.5 r of p.
      std::size_t cand_end = m;
      while (cand_end < n && D[p * n + op[cand_end]] <= r + half) ++cand_end;

      std::size_t cover = 0;
      bool exact = m <= options.exact_max_ball && m <= 32;
      if (exact) {
        std::vector<std::uint32_t> masks;
        masks.reserve(cand_end);
        for (std::size_t ci = 0; ci < cand_end; ++ci) {
          const std::size_t q = op[ci];
          std::uint32_t mask = 0;
          for (auto x : order[q]) {
            if (D[q * n + x] > half) break;
            if (local[x] >= 0) mask |= 1u << local[x];
          }
          if (mask) masks.push_back(mask);
        }
        const std::uint32_t full = m == 32 ? 0xFFFFFFFFu : ((1u << m) - 1);
        cover = exact_cover_size(std::move(masks), full, m);
      } else {
        const std::size_t words = (m + 63) / 64;
        std::vector<Bits> cov;
        cov.reserve(cand_end);
        for (std::size_t ci = 0; ci < cand_end; ++ci) {
          const std::size_t q = op[ci];
          Bits bits(words, 0);
          bool any = false;
          for (auto x : order[q]) {
            if (D[q * n + x] > half) break;
            if (local[x] >= 0) {
              bits[local[x] / 64] |= 1ull << (local[x] % 64);
              any = true;
            }
          }
          if (any) cov.push_back(std::move(bits));
        }
        Bits uncovered(words, ~0ull);
        if (m % 64) uncovered.back() = (1ull << (m % 64)) - 1;
        std::size_t remaining = m;
        while (remaining > 0) {
          std::size_t best = 0, gain = 0;
          for (std::size_t c = 0; c < cov.size(); ++c) {
            const auto g = popcount_and(cov[c], uncovered);
            if (g > gain) {
              gain = g;
              best = c;
            }
          }
          for (std::size_t w = 0; w < words; ++w) uncovered[w] &= ~cov[best][w];
          remaining -= gain;
          ++cover;
        }
      }
      for (std::size_t i = 0; i < m; ++i) local[op[i]] = -1;

      if (cover > best_cover) {
        best_cover = cover;
        est.witness_center = p;
        est.witness_radius = r;
        est.witness_cover = cover;
        witness_exact = exact;
      }
    }
  }
  est.value = std::log2(static_cast<double>(best_cover));
  // Greedy covers only overestimate, so an exact witness makes the max exact.
  est.method = witness_exact ? DdimMethod::kExactSearch : DdimMethod::kGreedyCover;
  return est;
}

LevelAssignment level_of(Coords p, const std::vector<Point>& centers, double r0, int level_cap) {
  require(!centers.empty(), ErrorCode::kEmptyInput, "level_of needs at least one center");
  require(r0 > 0.0, ErrorCode::kInvalidArgument, "r0 must be > 0");
  LevelAssignment a;
  double best = HUGE_VAL;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const double d = dist(p, centers[i]);
    if (d < best) {
      best = d;
      a.owner = i;
    }
  }
  if (best == 0.0) {
    a.level = level_cap;
    a.radius = std::ldexp(r0, -level_cap);
    return a;
  }
  int j = static_cast<int>(std::floor(std::log2(r0 / best)));
  // Repair rounding so that r0/2^(j+1) <= best <= r0/2^j, preferring larger j.
  while (std::ldexp(r0, -j) < best) --j;
  while (std::ldexp(r0, -(j + 1)) >= best && j + 1 <= level_cap) ++j;
  if (j > level_cap) j = level_cap;
  a.level = j;
  a.radius = std::ldexp(r0, -j);
  return a;
}

SnapResult snap(Coords p, const Net& net, const WeightedPointSet& P) {
  require(!net.member_indices.empty(), ErrorCode::kEmptyInput, "cannot snap to an empty net");
  SnapResult s;
  double best = HUGE_VAL;
  for (auto m : net.member_indices) {
    const double d = squared_dist(p, P.point(m));
    if (d < best || (d == best && m < s.index)) {
      best = d;
      s.index = m;
    }
  }
  s.distance = std::sqrt(best);
  return s;
}

double NetHierarchy::radius(int level) const { return std::ldexp(r0, -level); }

const NetLevel* NetHierarchy::find_level(int level) const {
  if (level < ell_min || level > ell_max) return nullptr;
  return &levels[static_cast<std::size_t>(level - ell_min)];
}

NetHierarchy build_hierarchy(const WeightedPointSet& P, const WeightedPointSet& Q,
                             const std::vector<Point>& centers, double r0, int ell_min,
                             int ell_max, double eps, const HierarchyOptions& options) {
  require(r0 > 0.0, ErrorCode::kInvalidArgument, "r0 must be > 0");
  require(ell_min <= ell_max, ErrorCode::kInvalidArgument, "invalid level range");
  require(eps > 0.0 && eps < 0.5, ErrorCode::kInvalidArgument, "eps must lie in (0, 1/2)");
  require(!centers.empty(), ErrorCode::kEmptyInput, "hierarchy needs centers");
  require(P.dim() == Q.dim(), ErrorCode::kDimensionMismatch, "P and Q differ in dimension");

  // Universe: P, then the points of Q not already in P.
  std::vector<double> coords = P.flat();
  std::vector<std::uint64_t> weights = P.weights();
  std::vector<std::ptrdiff_t> q_index(P.size(), -1);
  std::vector<std::size_t> from_q(Q.size());
  for (std::size_t j = 0; j < Q.size(); ++j) {
    const auto at = P.find(Q.point(j));
    if (at >= 0) {
      q_index[static_cast<std::size_t>(at)] = static_cast<std::ptrdiff_t>(j);
      from_q[j] = static_cast<std::size_t>(at);
    } else {
      coords.insert(coords.end(), Q.point(j).begin(), Q.point(j).end());
      weights.push_back(Q.weight(j));
      q_index.push_back(static_cast<std::ptrdiff_t>(j));
      from_q[j] = weights.size() - 1;
    }
  }
  NetHierarchy h{.universe = WeightedPointSet(P.dim(), std::move(coords), std::move(weights))};
  h.num_p = P.size();
  h.q_index = std::move(q_index);
  h.from_q = std::move(from_q);
  h.centers = centers;
  h.r0 = r0;
  h.eps = eps;
  h.ell_min = ell_min;
  h.ell_max = ell_max;
  h.rule = options.rule;

  if (options.rule == HostRule::kClusterBalls) {
    require(options.clusters.has_value() && options.clusters->size() == P.size(),
            ErrorCode::kInvalidArgument, "cluster-ball hierarchy needs one slot per P point");
  }
  const int shift = static_cast<int>(std::ceil(std::log2(1.0 / eps) - 1e-12));
  const double eps3 = eps * eps * eps;

  for (int l = ell_min; l <= ell_max; ++l) {
    NetLevel lvl;
    lvl.level = l;
    lvl.radius = h.radius(l);
    std::vector<std::size_t> hosts;
    if (options.rule == HostRule::kEnlargedBalls) {
      const double ball = h.radius(l - shift);
      for (std::size_t u = 0; u < h.universe.size(); ++u) {
        for (const auto& c : centers) {
          if (dist(h.universe.point(u), c) <= ball) {
            hosts.push_back(u);
            break;
          }
        }
      }
    } else {
      for (std::size_t u = 0; u < P.size(); ++u) {
        const auto slot = (*options.clusters)[u];
        require(slot < centers.size(), ErrorCode::kInvalidArgument, "cluster slot out of range");
        if (dist(P.point(u), centers[slot]) <= lvl.radius) hosts.push_back(u);
      }
    }
    lvl.net.rho = eps3 * lvl.radius;
    if (!hosts.empty()) lvl.net = build_net(h.universe, hosts, eps3 * lvl.radius);
    h.levels.push_back(std::move(lvl));
  }
  return h;
}

std::string hierarchy_to_json(const NetHierarchy& h) {
  nlohmann::ordered_json j;
  j["schema"] = "net-hierarchy/1";
  j["r0"] = h.r0;
  j["eps"] = h.eps;
  j["rule"] = h.rule == HostRule::kEnlargedBalls ? "enlarged-balls" : "cluster-balls";
  j["num_p"] = h.num_p;
  j["universe_size"] = h.universe.size();
  auto centers = nlohmann::ordered_json::array();
  for (const auto& c : h.centers) centers.push_back(std::vector<double>(c.coords().begin(), c.coords().end()));
  j["centers"] = centers;
  auto levels = nlohmann::ordered_json::array();
  for (const auto& l : h.levels) {
    nlohmann::ordered_json lj;
    lj["level"] = l.level;
    lj["radius"] = l.radius;
    lj["rho"] = l.net.rho;
    lj["hosts"] = l.net.host_indices;
    lj["members"] = l.net.member_indices;
    levels.push_back(lj);
  }
  j["levels"] = levels;
  return j.dump(2);
}

}  // namespace medoidjl
