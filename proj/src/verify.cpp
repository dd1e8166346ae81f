#include "medoidjl/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

#include "medoidjl/rng.hpp"

namespace medoidjl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> images(const GaussianMap& map, const WeightedPointSet& S) {
  const std::size_t t = map.target_dim();
  std::vector<double> out(S.size() * t);
  for (std::size_t i = 0; i < S.size(); ++i) {
    map.apply_into(S.point(i), std::span<double>(out.data() + i * t, t));
  }
  return out;
}

Coords image_at(const std::vector<double>& flat, std::size_t t, std::size_t i) {
  return Coords(flat.data() + i * t, t);
}

/// w_p |Gp - Gq|^z for all p, q.
CostTable image_table(const ClusteringInstance& inst, const GaussianMap& map) {
  require(inst.P.dim() == map.source_dim(), ErrorCode::kDimensionMismatch,
          "map source dimension does not match the instance");
  const std::size_t t = map.target_dim();
  const auto gp = images(map, inst.P);
  const auto gq = images(map, inst.Q);
  std::vector<double> v(inst.P.size() * inst.Q.size());
  for (std::size_t p = 0; p < inst.P.size(); ++p) {
    const double w = static_cast<double>(inst.P.weight(p));
    for (std::size_t q = 0; q < inst.Q.size(); ++q) {
      v[p * inst.Q.size() + q] =
          w * powered_dist(image_at(gp, t, p), image_at(gq, t, q), inst.z);
    }
  }
  return CostTable::from_values(inst.P.size(), inst.Q.size(), std::move(v));
}

OptResult solve(const CostTable& table, std::size_t k, const CheckOptions& options,
                const ClusteringInstance& inst, bool image, const GaussianMap& map) {
  if (binomial(table.cols(), std::min(k, table.cols())) <= options.budget) {
    return opt_exact(table, k, options.budget);
  }
  OptResult r = image ? opt_local(ClusteringInstance(apply_set(map, inst.P),
                                                     apply_set(map, inst.Q), k, inst.z),
                                  4, options.sample_seed)
                      : opt_local(inst, 4, options.sample_seed);
  return r;
}

/// The k-subsets a check ranges over: all of them, or a seeded sample.
struct CenterSets {
  bool exhaustive = true;
  std::vector<std::vector<std::size_t>> sampled;
};

CenterSets plan_center_sets(std::size_t m, std::size_t k, const CheckOptions& options) {
  CenterSets s;
  if (binomial(m, k) <= options.budget) return s;
  s.exhaustive = false;
  Rng rng(options.sample_seed);
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::size_t> pool(m);
  for (std::size_t i = 0; i < options.sampled_sets; ++i) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t j = 0; j < k; ++j) {
      const auto r = j + static_cast<std::size_t>(rng.below(m - j));
      std::swap(pool[j], pool[r]);
    }
    std::vector<std::size_t> c(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(c.begin(), c.end());
    if (seen.insert(c).second) s.sampled.push_back(std::move(c));
  }
  return s;
}

std::vector<std::size_t> argmin_slots(const CostTable& table, std::span<const std::size_t> centers) {
  std::vector<std::size_t> slot(table.rows(), 0);
  for (std::size_t p = 0; p < table.rows(); ++p) {
    double best = table(p, centers[0]);
    for (std::size_t i = 1; i < centers.size(); ++i) {
      if (table(p, centers[i]) < best) {
        best = table(p, centers[i]);
        slot[p] = i;
      }
    }
  }
  return slot;
}

/// min over the planned sets of sum_p min_i table(p, c_i), with its argmin.
OptResult min_over_sets(const CostTable& table, std::size_t k, const CenterSets& sets,
                        std::uint64_t budget) {
  if (sets.exhaustive) return opt_exact(table, k, budget);
  OptResult best;
  best.value = kInf;
  for (const auto& c : sets.sampled) {
    const double v = cost(table, c);
    if (v < best.value) {
      best.value = v;
      best.solution.center_indices = c;
    }
  }
  best.solution.partition = argmin_slots(table, best.solution.center_indices);
  return best;
}

double partition_sum(const CostTable& table, std::span<const std::size_t> centers,
                     std::span<const std::size_t> partition) {
  double s = 0.0;
  for (std::size_t p = 0; p < table.rows(); ++p) s += table(p, centers[partition[p]]);
  return s;
}

CostTable combine(const CostTable& A, const CostTable& B, double lambda) {
  std::vector<double> v(A.rows() * A.cols());
  for (std::size_t p = 0; p < A.rows(); ++p) {
    for (std::size_t q = 0; q < A.cols(); ++q) v[p * A.cols() + q] = A(p, q) - lambda * B(p, q);
  }
  return CostTable::from_values(A.rows(), A.cols(), std::move(v));
}

}  // namespace

GuaranteeReport check_expansion(const ClusteringInstance& inst, const GaussianMap& map, double eps,
                                const CheckOptions& options) {
  require(eps > 0.0, ErrorCode::kInvalidArgument, "eps must be positive");
  GuaranteeReport r;
  r.check_name = "expansion";
  const CostTable src(inst);
  const CostTable img = image_table(inst, map);
  const auto o = solve(src, inst.k, options, inst, false, map);
  const auto og = solve(img, inst.k, options, inst, true, map);
  r.exact = o.exact && og.exact;
  r.details["opt"] = o.value;
  r.details["opt_image"] = og.value;
  if (o.value == 0.0) {
    r.worst_ratio = og.value == 0.0 ? 1.0 : kInf;
  } else {
    r.worst_ratio = og.value / o.value;
  }
  r.pass = og.value <= (1.0 + eps) * o.value;
  r.witness = og.solution;
  return r;
}

GuaranteeReport check_contraction_all_centers_partitions(const ClusteringInstance& inst,
                                                         const GaussianMap& map, double eps,
                                                         const CheckOptions& options) {
  require(eps > 0.0 && eps < 1.0, ErrorCode::kInvalidArgument, "eps must lie in (0, 1)");
  GuaranteeReport r;
  r.check_name = "contraction";
  const std::size_t k = std::min(inst.k, inst.Q.size());
  const CostTable B(inst);
  const CostTable A = image_table(inst, map);
  const auto sets = plan_center_sets(inst.Q.size(), k, options);
  r.exact = sets.exhaustive;
  r.details["center_sets"] =
      sets.exhaustive ? static_cast<double>(binomial(inst.Q.size(), k))
                      : static_cast<double>(sets.sampled.size());

  const auto slack = min_over_sets(combine(A, B, 1.0 - eps), k, sets, options.budget);
  r.details["min_slack"] = slack.value;
  r.pass = slack.value >= 0.0;

  // Dinkelbach iteration on the ratio sum A / sum B over (C, partition).
  Solution witness = slack.solution;
  double lambda = 1.0;
  {
    const double a = partition_sum(A, witness.center_indices, *witness.partition);
    const double b = partition_sum(B, witness.center_indices, *witness.partition);
    if (b > 0.0) lambda = a / b;
  }
  int iterations = 0;
  for (; iterations < 200; ++iterations) {
    const auto res = min_over_sets(combine(A, B, lambda), k, sets, options.budget);
    const double a = partition_sum(A, res.solution.center_indices, *res.solution.partition);
    const double b = partition_sum(B, res.solution.center_indices, *res.solution.partition);
    if (res.value >= -1e-14 * std::max(a, lambda * b) || b <= 0.0) break;
    const double next = a / b;
    if (!(next < lambda)) break;
    lambda = next;
    witness = res.solution;
  }
  r.details["dinkelbach_iterations"] = iterations;
  r.worst_ratio = lambda;
  r.witness = witness;
  return r;
}

namespace {

/// Visits every k-subset in lexicographic order with running minima of two
/// tables; `leaf` receives (set, sum of A minima, sum of B minima).
template <typename Leaf>
void visit_subsets_two(const CostTable& A, const CostTable& B, std::size_t k, Leaf&& leaf) {
  const std::size_t n = A.rows(), m = A.cols();
  std::vector<double> ma((k + 1) * n, kInf), mb((k + 1) * n, kInf);
  std::vector<std::size_t> chosen(k);
  auto rec = [&](auto&& self, std::size_t depth, std::size_t start) -> void {
    const double* pa = ma.data() + depth * n;
    const double* pb = mb.data() + depth * n;
    if (depth + 1 == k) {
      for (std::size_t c = start; c < m; ++c) {
        double sa = 0.0, sb = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
          sa += std::min(pa[p], A(p, c));
          sb += std::min(pb[p], B(p, c));
        }
        chosen[depth] = c;
        leaf(std::span<const std::size_t>(chosen), sa, sb);
      }
      return;
    }
    double* ca = ma.data() + (depth + 1) * n;
    double* cb = mb.data() + (depth + 1) * n;
    for (std::size_t c = start; c + (k - depth) <= m; ++c) {
      for (std::size_t p = 0; p < n; ++p) {
        ca[p] = std::min(pa[p], A(p, c));
        cb[p] = std::min(pb[p], B(p, c));
      }
      chosen[depth] = c;
      self(self, depth + 1, c + 1);
    }
  };
  rec(rec, 0, 0);
}

}  // namespace

GuaranteeReport check_relaxed_contraction(const ClusteringInstance& inst, const GaussianMap& map,
                                          double eps, double alpha, const CheckOptions& options) {
  require(eps > 0.0 && eps < 1.0, ErrorCode::kInvalidArgument, "eps must lie in (0, 1)");
  require(alpha > 0.0, ErrorCode::kInvalidArgument, "alpha must be positive");
  GuaranteeReport r;
  r.check_name = "relaxed-contraction";
  const std::size_t k = std::min(inst.k, inst.Q.size());
  const CostTable B(inst);
  const CostTable A = image_table(inst, map);
  const auto o = solve(B, inst.k, options, inst, false, map);
  const double alpha_opt = alpha * o.value;
  const auto sets = plan_center_sets(inst.Q.size(), k, options);
  r.exact = o.exact && sets.exhaustive;

  std::size_t in_alpha = 0, in_eps = 0, fail_alpha = 0, fail_eps = 0, total = 0;
  double worst = kInf;
  std::vector<std::size_t> worst_set;
  auto leaf = [&](std::span<const std::size_t> c, double img_cost, double src_cost) {
    ++total;
    const double eps_term = (1.0 - eps) * src_cost;
    const bool alpha_branch = alpha_opt < eps_term;
    const double floor = std::min(alpha_opt, eps_term);
    const bool ok = img_cost >= floor;
    if (alpha_branch) {
      ++in_alpha;
      if (!ok) ++fail_alpha;
    } else {
      ++in_eps;
      if (!ok) ++fail_eps;
    }
    const double ratio = floor > 0.0 ? img_cost / floor : 1.0;
    if (ratio < worst) {
      worst = ratio;
      worst_set.assign(c.begin(), c.end());
    }
  };
  if (sets.exhaustive) {
    visit_subsets_two(A, B, k, leaf);
  } else {
    for (const auto& c : sets.sampled) leaf(c, cost(A, c), cost(B, c));
  }
  r.pass = fail_alpha + fail_eps == 0;
  r.worst_ratio = worst;
  Solution w;
  w.center_indices = worst_set;
  w.partition = argmin_slots(A, worst_set);
  r.witness = w;
  r.details["opt"] = o.value;
  r.details["alpha"] = alpha;
  r.details["center_sets"] = static_cast<double>(total);
  r.details["alpha_branch"] = static_cast<double>(in_alpha);
  r.details["eps_branch"] = static_cast<double>(in_eps);
  r.details["alpha_branch_failures"] = static_cast<double>(fail_alpha);
  r.details["eps_branch_failures"] = static_cast<double>(fail_eps);
  return r;
}

namespace {

GuaranteeReport preserve_sum_from_images(const WeightedPointSet& P, Coords c,
                                         const std::vector<double>& gp, Coords gc,
                                         PowerExponent z, double eps, double slack) {
  const std::size_t t = gc.size();
  const double thr = std::pow(1.0 - eps, 3.0 * z.value());
  GuaranteeReport r;
  r.check_name = "preserve-sum";
  SubsetWitness subset;
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double w = static_cast<double>(P.weight(i));
    const double a = w * powered_dist(image_at(gp, t, i), gc, z);
    const double b = w * powered_dist(P.point(i), c, z);
    if (a - thr * b < 0.0) {
      subset.indices.push_back(i);
      lhs += a;
      rhs += b;
    }
  }
  rhs *= thr;
  r.pass = lhs >= rhs - slack;
  r.worst_ratio = rhs > 0.0 ? (lhs + slack) / rhs : 1.0;
  r.details["lhs"] = lhs;
  r.details["rhs"] = rhs;
  r.details["slack"] = slack;
  r.details["margin"] = lhs - rhs + slack;
  r.details["subset_size"] = static_cast<double>(subset.indices.size());
  r.witness = std::move(subset);
  return r;
}

}  // namespace

GuaranteeReport check_preserve_sum_slack(const WeightedPointSet& P, Coords c, PowerExponent z,
                                         double eps, const GaussianMap& map, double slack) {
  require(eps > 0.0 && eps < 1.0, ErrorCode::kInvalidArgument, "eps must lie in (0, 1)");
  require(c.size() == P.dim(), ErrorCode::kDimensionMismatch, "center dimension mismatch");
  const auto gp = images(map, P);
  const Point gc = apply(map, c);
  return preserve_sum_from_images(P, c, gp, gc, z, eps, slack);
}

GuaranteeReport check_preserve_sum(const WeightedPointSet& P, Coords c, std::size_t k,
                                   PowerExponent z, double eps, const GaussianMap& map,
                                   std::uint64_t optcont_budget) {
  const double optcont = optcont_small(P, k, z, optcont_budget);
  const double kk = static_cast<double>(k);
  auto r = check_preserve_sum_slack(P, c, z, eps, map, eps / (kk * kk) * optcont);
  r.details["optcont"] = optcont;
  return r;
}

WeightedPointSet symmetrize(const WeightedPointSet& X, Coords c) {
  require(c.size() == X.dim(), ErrorCode::kDimensionMismatch, "center dimension mismatch");
  std::vector<Point> pts;
  std::vector<std::uint64_t> w;
  for (std::size_t i = 0; i < X.size(); ++i) {
    pts.push_back(X.point_copy(i));
    w.push_back(X.weight(i));
  }
  for (std::size_t i = 0; i < X.size(); ++i) {
    std::vector<double> m(X.dim());
    auto x = X.point(i);
    for (std::size_t j = 0; j < X.dim(); ++j) m[j] = 2.0 * c[j] - x[j];
    pts.emplace_back(std::move(m));
    w.push_back(X.weight(i));
  }
  return WeightedPointSet::from_multiset(pts, w);
}

void require_symmetric(const WeightedPointSet& X, Coords c, double rel_tol) {
  require(c.size() == X.dim(), ErrorCode::kDimensionMismatch, "center dimension mismatch");
  double extent = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) extent = std::max(extent, dist(X.point(i), c));
  const double tol = rel_tol * std::max(extent, 1e-300);
  std::vector<double> m(X.dim());
  for (std::size_t i = 0; i < X.size(); ++i) {
    auto x = X.point(i);
    for (std::size_t j = 0; j < X.dim(); ++j) m[j] = 2.0 * c[j] - x[j];
    bool found = false;
    for (std::size_t j = 0; j < X.size() && !found; ++j) {
      found = X.weight(j) == X.weight(i) && dist(X.point(j), m) <= tol;
    }
    require(found, ErrorCode::kNotSymmetric,
            "point " + std::to_string(i) + " has no mirror image of equal weight");
  }
}

GuaranteeReport check_central_symmetric(const WeightedPointSet& X, Coords c, PowerExponent z,
                                        std::size_t probes, std::uint64_t seed) {
  require_symmetric(X, c);
  GuaranteeReport r;
  r.check_name = "central-symmetric";
  const double base = cost_to_point(X, c, z);
  double second = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    second += static_cast<double>(X.weight(i)) * squared_dist(X.point(i), c);
  }
  const double spread = std::sqrt(second / static_cast<double>(X.total_weight()));
  r.details["cost_at_center"] = base;
  if (spread == 0.0) {
    r.pass = true;
    r.worst_ratio = 1.0;
    r.witness = Point(std::vector<double>(c.begin(), c.end()));
    return r;
  }
  const Point cc = continuous_center(X, z);
  double best = cost_to_point(X, cc, z);
  Point best_point = cc;
  r.details["solver_offset"] = dist(cc, c) / spread;
  Rng rng(seed);
  std::vector<double> probe(X.dim());
  for (std::size_t i = 0; i < probes; ++i) {
    double len = 0.0;
    for (auto& x : probe) {
      x = rng.normal();
      len += x * x;
    }
    const double radius = spread * std::pow(10.0, rng.uniform(-6.0, 0.0)) / std::sqrt(len);
    for (std::size_t j = 0; j < X.dim(); ++j) probe[j] = c[j] + radius * probe[j];
    const double v = cost_to_point(X, probe, z);
    if (v < best) {
      best = v;
      best_point = Point(probe);
    }
  }
  r.worst_ratio = best / base;
  r.pass = base <= best * (1.0 + 1e-9);
  r.witness = best_point;
  return r;
}

GuaranteeReport check_fixed_solution_expansion(const ClusteringInstance& inst,
                                               std::span<const std::size_t> centers,
                                               std::span<const std::size_t> partition,
                                               const GaussianMap& map, double eps) {
  require(eps > 0.0, ErrorCode::kInvalidArgument, "eps must be positive");
  const double src = cost_partition(inst, partition, centers);
  const std::size_t t = map.target_dim();
  const auto gp = images(map, inst.P);
  std::vector<double> gc(centers.size() * t);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    map.apply_into(inst.Q.point(centers[i]), std::span<double>(gc.data() + i * t, t));
  }
  double img = 0.0;
  for (std::size_t p = 0; p < inst.P.size(); ++p) {
    img += static_cast<double>(inst.P.weight(p)) *
           powered_dist(image_at(gp, t, p), image_at(gc, t, partition[p]), inst.z);
  }
  GuaranteeReport r;
  r.check_name = "fixed-solution-expansion";
  r.pass = img <= (1.0 + eps) * src;
  r.worst_ratio = src > 0.0 ? img / src : (img == 0.0 ? 1.0 : kInf);
  r.details["cost"] = src;
  r.details["cost_image"] = img;
  Solution w;
  w.center_indices.assign(centers.begin(), centers.end());
  w.partition = std::vector<std::size_t>(partition.begin(), partition.end());
  r.witness = std::move(w);
  return r;
}

int GoodEventsSetup::buffer_low(std::size_t slot) const {
  require(slot < threshold.size() && threshold[slot].has_value(), ErrorCode::kMissingLevels,
          "no threshold level for this slot");
  const double L = params.L;
  return *threshold[slot] - static_cast<int>(std::ceil(std::log2(2000.0 * L * L) - 1e-12));
}

int GoodEventsSetup::buffer_high(std::size_t slot) const {
  require(slot < threshold.size() && threshold[slot].has_value(), ErrorCode::kMissingLevels,
          "no threshold level for this slot");
  const double ak = params.alpha * static_cast<double>(inst.k);
  return *threshold[slot] + static_cast<int>(std::ceil(std::log2(ak) - 1e-12));
}

GoodEventsSetup prepare_good_events(const ClusteringInstance& inst, const GoodEventsParams& params,
                                    std::uint64_t budget) {
  require(params.eps > 0.0 && params.eps < 0.5, ErrorCode::kInvalidArgument,
          "eps must lie in (0, 1/2)");
  require(params.alpha > 2.0 && params.L >= 1.0, ErrorCode::kInvalidArgument,
          "alpha must exceed 2 and L must be >= 1");
  GoodEventsSetup s{inst, opt_auto(inst, budget), {}, {}, {}, NetHierarchy{
      .universe = inst.P}, params};
  const double opt = s.opt.value;
  require(opt > 0.0, ErrorCode::kInvalidArgument, "optimal cost is zero; levels are undefined");
  const double z = inst.z.value();
  const double r0 = std::pow(opt, 1.0 / z);
  std::vector<Point> centers;
  for (auto q : s.opt.solution.center_indices) centers.push_back(inst.Q.point_copy(q));
  s.clusters = assign_source(inst, s.opt.solution.center_indices);

  // Threshold: largest l with |P_l^i| r_l^z > alpha opt, i.e. |P_l^i| 2^{-lz} > alpha.
  s.threshold.assign(centers.size(), std::nullopt);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (int l = kDefaultLevelCap; l >= -kDefaultLevelCap; --l) {
      const double r = r0 * std::ldexp(1.0, -l);
      double mass = 0.0;
      for (std::size_t p = 0; p < inst.P.size(); ++p) {
        if (s.clusters[p] == i && dist(inst.P.point(p), centers[i]) <= r) {
          mass += static_cast<double>(inst.P.weight(p));
        }
      }
      if (mass * std::pow(2.0, -static_cast<double>(l) * z) > params.alpha) {
        s.threshold[i] = l;
        break;
      }
    }
  }

  // Levels of every point of P u Q and of every buffer.
  std::vector<int> lv;
  auto add_point_levels = [&](const WeightedPointSet& S) {
    for (std::size_t u = 0; u < S.size(); ++u) lv.push_back(level_of(S.point(u), centers, r0).level);
  };
  add_point_levels(inst.P);
  add_point_levels(inst.Q);
  int lo = *std::min_element(lv.begin(), lv.end());
  int hi = *std::max_element(lv.begin(), lv.end());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (!s.threshold[i]) continue;
    lo = std::min(lo, s.buffer_low(i));
    hi = std::max(hi, s.buffer_high(i));
  }
  s.hierarchy = build_hierarchy(inst.P, inst.Q, centers, r0, lo, hi, params.eps);
  s.point_level.resize(s.hierarchy.universe.size());
  for (std::size_t u = 0; u < s.hierarchy.universe.size(); ++u) {
    s.point_level[u] = level_of(s.hierarchy.universe.point(u), centers, r0).level;
  }
  return s;
}

GoodEventsReport good_events_diagnostics(const GoodEventsSetup& s, const GaussianMap& map) {
  const auto& h = s.hierarchy;
  const auto& U = h.universe;
  const std::size_t t = map.target_dim();
  const double eps = s.params.eps, alpha = s.params.alpha, L = s.params.L;
  const PowerExponent z = s.inst.z;
  const double zv = z.value();
  const double opt = s.opt.value;
  const std::size_t k = s.hierarchy.centers.size();
  const auto gu = images(map, U);
  auto g = [&](std::size_t u) { return image_at(gu, t, u); };
  std::vector<std::size_t> center_u(k);
  for (std::size_t i = 0; i < k; ++i) {
    center_u[i] = h.from_q[s.opt.solution.center_indices[i]];
  }

  GoodEventsReport rep;
  auto upper = [&](std::string name, double value, double bound) {
    const double load = bound > 0.0 ? value / bound : (value > 0.0 ? kInf : 0.0);
    rep.events.push_back({std::move(name), value <= bound, value, bound, load});
  };
  auto lower = [&](std::string name, double value, double bound, bool strict) {
    const double load = value > 0.0 ? bound / value : (bound > 0.0 ? kInf : 0.0);
    rep.events.push_back({std::move(name), strict ? value > bound : value >= bound, value, bound, load});
  };
  const double eps3 = eps * eps * eps;
  for (const auto& lvl : h.levels) {
    const auto& mem = lvl.net.member_indices;
    double beta = 0.0;
    for (std::size_t a = 0; a < mem.size(); ++a) {
      for (std::size_t b = a + 1; b < mem.size(); ++b) {
        const double ratio = dist(g(mem[a]), g(mem[b])) / dist(U.point(mem[a]), U.point(mem[b]));
        beta = std::max(beta, ((1.0 - eps) - ratio) / eps);
      }
    }
    const double rad = eps3 * lvl.radius;
    double gamma = 0.0;
    for (auto u : mem) {
      for (std::size_t v = 0; v < U.size(); ++v) {
        if (dist(U.point(u), U.point(v)) <= rad) {
          gamma = std::max(gamma, dist(g(u), g(v)) / rad);
        }
      }
    }
    rep.level_stats[lvl.level] = {beta, gamma};
  }
  auto stats_at = [&](int level) {
    auto it = rep.level_stats.find(level);
    require(it != rep.level_stats.end(), ErrorCode::kMissingLevels,
            "hierarchy lacks level " + std::to_string(level));
    return it->second;
  };

  // (a)
  double sum_beta = 0.0, sum_gamma = 0.0;
  for (std::size_t p = 0; p < h.num_p; ++p) {
    const double w = static_cast<double>(U.weight(p));
    const auto [beta, gamma] = stats_at(s.point_level[p]);
    const double rz = std::pow(h.radius(s.point_level[p]), zv);
    sum_beta += w * beta * rz;
    sum_gamma += w * std::pow(gamma, zv) * rz;
  }
  const double two_z = std::pow(2.0, zv);
  const double bound_beta = two_z * std::exp(-eps * eps * static_cast<double>(t) / 8.0) * opt;
  const double bound_gamma = std::pow(10.0, zv) * two_z * opt;
  upper("a.beta", sum_beta, bound_beta);
  upper("a.gamma", sum_gamma, bound_gamma);

  const double slack = eps / static_cast<double>(k * k) * opt;
  const WeightedPointSet& P = s.inst.P;
  const std::vector<double> gp(gu.begin(), gu.begin() + static_cast<std::ptrdiff_t>(h.num_p * t));
  for (std::size_t i = 0; i < k; ++i) {
    if (!s.threshold[i]) continue;
    const std::string tag = "[" + std::to_string(i) + "]";
    const int li = *s.threshold[i];
    const double ri = h.radius(li);
    // (c) and (d) over the buffer.
    double worst_gamma = 0.0;
    double worst_d = kInf;
    bool d_ok = true;
    for (int l = s.buffer_low(i); l <= s.buffer_high(i); ++l) {
      worst_gamma = std::max(worst_gamma, stats_at(l).second);
      const auto* lvl = h.find_level(l);
      for (auto u : lvl->net.member_indices) {
        const auto r = preserve_sum_from_images(P, U.point(u), gp, g(u), z, eps, slack);
        d_ok = d_ok && r.pass;
        worst_d = std::min(worst_d, r.worst_ratio);
      }
    }
    upper("c" + tag, worst_gamma, 10.0);
    lower("d" + tag, worst_d, 1.0, false);
    rep.events.back().pass = d_ok;

    // (e) and (f)
    const auto ci = center_u[i];
    double worst_e = 0.0, worst_f = kInf;
    for (std::size_t y = 0; y < U.size(); ++y) {
      const double dy = dist(U.point(y), U.point(ci));
      const double gy = dist(g(y), g(ci));
      if (dy <= 40.0 * L * ri) worst_e = std::max(worst_e, gy / (400.0 * L * ri));
      if (dy > 2000.0 * L * L * ri) worst_f = std::min(worst_f, gy / (2000.0 * L * ri));
    }
    upper("e" + tag, worst_e, 1.0);
    lower("f" + tag, worst_f, 1.0, true);

    // (g)
    double sum_xi = 0.0;
    for (std::size_t p = 0; p < h.num_p; ++p) {
      if (s.clusters[p] != i || dist(U.point(p), U.point(ci)) > ri) continue;
      double xi = kInf;
      for (std::size_t y = 0; y < U.size(); ++y) {
        if (dist(U.point(y), U.point(p)) > 9.0 * L * ri) xi = std::min(xi, dist(g(y), g(p)));
      }
      sum_xi += static_cast<double>(U.weight(p)) * std::pow(xi, zv);
    }
    lower("g" + tag, sum_xi, alpha * opt, true);

    // (h)
    double excess = 0.0, base = 0.0;
    for (std::size_t p = 0; p < h.num_p; ++p) {
      if (s.clusters[p] != i) continue;
      const double rp = h.radius(s.point_level[p]);
      const double w = static_cast<double>(U.weight(p));
      double eta = kInf;
      for (std::size_t y = 0; y < U.size(); ++y) {
        if (dist(U.point(y), U.point(p)) > 9.0 * L * rp) eta = std::min(eta, dist(g(y), g(p)));
      }
      excess += w * std::max(0.0, std::pow(9.0 * rp, zv) - std::pow(eta, zv));
      base += w * std::pow(rp, zv);
    }
    const double bound_h = std::exp(-static_cast<double>(t) / 8.0) * base;
    upper("h" + tag, excess, bound_h);
  }
  rep.pass = std::all_of(rep.events.begin(), rep.events.end(),
                         [](const EventResult& e) { return e.pass; });
  for (const auto& e : rep.events) rep.worst_load = std::max(rep.worst_load, e.load);
  return rep;
}

TrialSummary run_trials(const SeededCheck& check, std::size_t trials, std::uint64_t base_seed,
                        std::size_t workers) {
  require(trials >= 1, ErrorCode::kInvalidArgument, "trials must be >= 1");
  TrialSummary s;
  s.trials = trials;
  s.reports.resize(trials);
  s.seeds.resize(trials);
  for (std::size_t i = 0; i < trials; ++i) s.seeds[i] = base_seed + i;
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(trials);
  auto work = [&] {
    for (std::size_t i = next++; i < trials; i = next++) {
      try {
        s.reports[i] = check(s.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(workers, trials));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& r : s.reports) s.successes += r.pass ? 1 : 0;
  s.success_rate = static_cast<double>(s.successes) / static_cast<double>(trials);
  return s;
}

double wilson_lower(std::size_t successes, std::size_t trials, double z_score) {
  require(trials >= 1, ErrorCode::kInvalidArgument, "trials must be >= 1");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z_score * z_score;
  const double centre = p + z2 / (2.0 * n);
  const double spread = z_score * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return std::max(0.0, (centre - spread) / (1.0 + z2 / n));
}

}  // namespace medoidjl
