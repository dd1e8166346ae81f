#include "medoidjl/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "medoidjl/rng.hpp"

namespace medoidjl {

ClusteringInstance::ClusteringInstance(WeightedPointSet p, WeightedPointSet q, std::size_t k_,
                                       PowerExponent z_)
    : P(std::move(p)), Q(std::move(q)), k(k_), z(z_) {
  require(P.dim() == Q.dim(), ErrorCode::kDimensionMismatch, "P and Q differ in dimension");
  require(k >= 1, ErrorCode::kInvalidArgument, "k must be >= 1");
  require(k <= Q.total_weight(), ErrorCode::kInvalidArgument, "k exceeds the size of Q");
}

ClusteringInstance ClusteringInstance::discrete(WeightedPointSet p, std::size_t k, PowerExponent z) {
  WeightedPointSet q = p;
  return ClusteringInstance(std::move(p), std::move(q), k, z);
}

ClusteringInstance project(const ClusteringInstance& inst, const GaussianMap& map) {
  return ClusteringInstance(apply_set(map, inst.P), apply_set(map, inst.Q), inst.k, inst.z);
}

CostTable::CostTable(const WeightedPointSet& P, const WeightedPointSet& Q, PowerExponent z)
    : n_(P.size()), m_(Q.size()), v_(P.size() * Q.size()) {
  require(P.dim() == Q.dim(), ErrorCode::kDimensionMismatch, "P and Q differ in dimension");
  for (std::size_t p = 0; p < n_; ++p) {
    const double w = static_cast<double>(P.weight(p));
    for (std::size_t q = 0; q < m_; ++q) {
      v_[p * m_ + q] = w * powered_dist(P.point(p), Q.point(q), z);
    }
  }
}

CostTable CostTable::from_values(std::size_t rows, std::size_t cols, std::vector<double> values) {
  require(values.size() == rows * cols, ErrorCode::kDimensionMismatch,
          "cost table value count does not match rows x cols");
  CostTable t;
  t.n_ = rows;
  t.m_ = cols;
  t.v_ = std::move(values);
  return t;
}

namespace {

void check_centers(std::span<const std::size_t> centers, std::size_t m) {
  require(!centers.empty(), ErrorCode::kEmptyInput, "center set must be nonempty");
  for (auto c : centers) {
    require(c < m, ErrorCode::kInvalidArgument, "center index out of range");
  }
}

}  // namespace

double cost(const CostTable& table, std::span<const std::size_t> centers) {
  check_centers(centers, table.cols());
  double total = 0.0;
  for (std::size_t p = 0; p < table.rows(); ++p) {
    const double* row = table.row(p);
    double best = row[centers[0]];
    for (std::size_t i = 1; i < centers.size(); ++i) best = std::min(best, row[centers[i]]);
    total += best;
  }
  return total;
}

double cost(const ClusteringInstance& inst, std::span<const std::size_t> centers) {
  check_centers(centers, inst.Q.size());
  double total = 0.0;
  for (std::size_t p = 0; p < inst.P.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (auto c : centers) {
      best = std::min(best, powered_dist(inst.P.point(p), inst.Q.point(c), inst.z));
    }
    total += static_cast<double>(inst.P.weight(p)) * best;
  }
  return total;
}

double cost_partition(const ClusteringInstance& inst, std::span<const std::size_t> partition,
                      std::span<const std::size_t> centers) {
  check_centers(centers, inst.Q.size());
  require(partition.size() == inst.P.size(), ErrorCode::kInvalidArgument,
          "partition must assign every point of P");
  double total = 0.0;
  for (std::size_t p = 0; p < inst.P.size(); ++p) {
    require(partition[p] < centers.size(), ErrorCode::kInvalidArgument,
            "partition slot out of range");
    total += static_cast<double>(inst.P.weight(p)) *
             powered_dist(inst.P.point(p), inst.Q.point(centers[partition[p]]), inst.z);
  }
  return total;
}

std::vector<std::size_t> assign_source(const ClusteringInstance& inst,
                                       std::span<const std::size_t> centers) {
  check_centers(centers, inst.Q.size());
  std::vector<std::size_t> slot(inst.P.size(), 0);
  for (std::size_t p = 0; p < inst.P.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const double d = squared_dist(inst.P.point(p), inst.Q.point(centers[i]));
      if (d < best) {
        best = d;
        slot[p] = i;
      }
    }
  }
  return slot;
}

std::vector<std::size_t> assign_target(const ClusteringInstance& inst,
                                       std::span<const std::size_t> centers,
                                       const GaussianMap& map) {
  check_centers(centers, inst.Q.size());
  const std::size_t t = map.target_dim();
  std::vector<double> gc(centers.size() * t);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    map.apply_into(inst.Q.point(centers[i]), std::span<double>(gc.data() + i * t, t));
  }
  std::vector<double> gp(t);
  std::vector<std::size_t> slot(inst.P.size(), 0);
  for (std::size_t p = 0; p < inst.P.size(); ++p) {
    map.apply_into(inst.P.point(p), gp);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const double d = squared_dist(gp, Coords(gc.data() + i * t, t));
      if (d < best) {
        best = d;
        slot[p] = i;
      }
    }
  }
  return slot;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(r);
}

namespace {

std::vector<std::size_t> nearest_slots(const CostTable& table, std::span<const std::size_t> centers) {
  std::vector<std::size_t> slot(table.rows(), 0);
  for (std::size_t p = 0; p < table.rows(); ++p) {
    const double* row = table.row(p);
    double best = row[centers[0]];
    for (std::size_t i = 1; i < centers.size(); ++i) {
      if (row[centers[i]] < best) {
        best = row[centers[i]];
        slot[p] = i;
      }
    }
  }
  return slot;
}

// Depth-first enumeration of k-subsets in lexicographic order with per-depth
// running minima, so each visited node costs O(n).
class SubsetSearch {
 public:
  SubsetSearch(const CostTable& table, std::size_t k)
      : table_(table), k_(k), n_(table.rows()), m_(table.cols()),
        mins_((k + 1) * table.rows(), std::numeric_limits<double>::infinity()),
        chosen_(k) {}

  void run() { descend(0, 0); }

  double best_value = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_set;

 private:
  void descend(std::size_t depth, std::size_t start) {
    const double* prev = mins_.data() + depth * n_;
    if (depth + 1 == k_) {
      for (std::size_t c = start; c < m_; ++c) {
        double total = 0.0;
        for (std::size_t p = 0; p < n_; ++p) total += std::min(prev[p], table_(p, c));
        if (total < best_value) {
          best_value = total;
          chosen_[depth] = c;
          best_set = chosen_;
        }
      }
      return;
    }
    double* cur = mins_.data() + (depth + 1) * n_;
    for (std::size_t c = start; c + (k_ - depth) <= m_; ++c) {
      for (std::size_t p = 0; p < n_; ++p) cur[p] = std::min(prev[p], table_(p, c));
      chosen_[depth] = c;
      descend(depth + 1, c + 1);
    }
  }

  const CostTable& table_;
  std::size_t k_, n_, m_;
  std::vector<double> mins_;
  std::vector<std::size_t> chosen_;
};

}  // namespace

OptResult opt_exact(const CostTable& table, std::size_t k, std::uint64_t budget) {
  require(k >= 1, ErrorCode::kInvalidArgument, "k must be >= 1");
  const std::size_t kk = std::min(k, table.cols());
  const auto count = binomial(table.cols(), kk);
  require(count <= budget, ErrorCode::kBudgetExceeded,
          "exhaustive search needs " + std::to_string(count) + " center sets, budget is " +
              std::to_string(budget));
  SubsetSearch search(table, kk);
  search.run();
  OptResult r;
  r.value = search.best_value;
  r.solution.center_indices = search.best_set;
  r.solution.partition = nearest_slots(table, search.best_set);
  r.exact = true;
  return r;
}

OptResult opt_exact(const ClusteringInstance& inst, std::uint64_t budget) {
  const auto count = binomial(inst.Q.size(), std::min(inst.k, inst.Q.size()));
  require(count <= budget, ErrorCode::kBudgetExceeded,
          "exhaustive search needs " + std::to_string(count) + " center sets, budget is " +
              std::to_string(budget));
  return opt_exact(CostTable(inst), inst.k, budget);
}

namespace {

struct LocalState {
  std::vector<std::size_t> centers;
  double value = 0.0;
};

LocalState swap_descent(const CostTable& table, std::vector<std::size_t> centers) {
  const std::size_t n = table.rows(), m = table.cols(), k = centers.size();
  std::vector<char> in_set(m, 0);
  for (auto c : centers) in_set[c] = 1;
  std::vector<double> d1(n), d2(n);
  std::vector<std::size_t> s1(n);
  double current = cost(table, centers);
  while (true) {
    for (std::size_t p = 0; p < n; ++p) {
      d1[p] = d2[p] = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < k; ++i) {
        const double v = table(p, centers[i]);
        if (v < d1[p]) {
          d2[p] = d1[p];
          d1[p] = v;
          s1[p] = i;
        } else if (v < d2[p]) {
          d2[p] = v;
        }
      }
    }
    double best = current;
    std::size_t best_slot = k, best_q = m;
    for (std::size_t slot = 0; slot < k; ++slot) {
      for (std::size_t q = 0; q < m; ++q) {
        if (in_set[q]) continue;
        double total = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
          const double keep = s1[p] == slot ? d2[p] : d1[p];
          total += std::min(keep, table(p, q));
        }
        if (total < best * (1.0 - 1e-12)) {
          best = total;
          best_slot = slot;
          best_q = q;
        }
      }
    }
    if (best_slot == k) break;
    in_set[centers[best_slot]] = 0;
    centers[best_slot] = best_q;
    in_set[best_q] = 1;
    current = best;
  }
  std::sort(centers.begin(), centers.end());
  return {centers, cost(table, centers)};
}

}  // namespace

OptResult opt_local(const ClusteringInstance& inst, std::size_t restarts, std::uint64_t seed) {
  const CostTable table(inst);
  const std::size_t m = inst.Q.size();
  const std::size_t k = std::min(inst.k, m);
  Rng rng(seed);
  LocalState best;
  best.value = std::numeric_limits<double>::infinity();
  const std::size_t runs = std::max<std::size_t>(1, restarts);
  for (std::size_t run = 0; run < runs; ++run) {
    std::vector<std::size_t> centers;
    if (run == 0) {
      // Best single candidate.
      double top = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t q = 0; q < m; ++q) {
        const std::size_t one[1] = {q};
        const double v = cost(table, one);
        if (v < top) {
          top = v;
          arg = q;
        }
      }
      centers.push_back(arg);
    } else {
      centers.push_back(static_cast<std::size_t>(rng.below(m)));
    }
    std::vector<double> gap(m, std::numeric_limits<double>::infinity());
    while (centers.size() < k) {
      const auto last = centers.back();
      std::size_t far = m;
      double far_d = -1.0;
      for (std::size_t q = 0; q < m; ++q) {
        gap[q] = std::min(gap[q], squared_dist(inst.Q.point(q), inst.Q.point(last)));
        if (gap[q] > far_d) {
          far_d = gap[q];
          far = q;
        }
      }
      centers.push_back(far);
    }
    auto local = swap_descent(table, centers);
    if (local.value < best.value) best = local;
  }
  OptResult r;
  r.value = best.value;
  r.solution.center_indices = best.centers;
  r.solution.partition = nearest_slots(table, best.centers);
  r.exact = false;
  return r;
}

OptResult opt_auto(const ClusteringInstance& inst, std::uint64_t budget, std::uint64_t seed) {
  if (binomial(inst.Q.size(), std::min(inst.k, inst.Q.size())) <= budget) {
    return opt_exact(inst, budget);
  }
  return opt_local(inst, 4, seed);
}

double cost_to_point(const WeightedPointSet& P, Coords c, PowerExponent z) {
  double total = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    total += static_cast<double>(P.weight(i)) * powered_dist(P.point(i), c, z);
  }
  return total;
}

namespace {

std::vector<double> weighted_centroid(const WeightedPointSet& P) {
  std::vector<double> c(P.dim(), 0.0);
  const double total = static_cast<double>(P.total_weight());
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double w = static_cast<double>(P.weight(i));
    auto p = P.point(i);
    for (std::size_t j = 0; j < P.dim(); ++j) c[j] += w * p[j];
  }
  for (auto& x : c) x /= total;
  return c;
}

}  // namespace

Point continuous_center(const WeightedPointSet& P, PowerExponent z, double tol,
                        std::size_t max_iter) {
  require(z.value() == 1.0 || z.value() == 2.0, ErrorCode::kUnsupported,
          "continuous_center supports z in {1, 2}");
  std::vector<double> y = weighted_centroid(P);
  if (z.value() == 2.0 || P.size() == 1) {
    if (P.size() == 1) return P.point_copy(0);
    return Point(std::move(y));
  }
  double scale = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) scale = std::max(scale, dist(P.point(i), y));
  if (scale == 0.0) return Point(std::move(y));
  const double coincide = 1e-12 * scale;
  const std::size_t d = P.dim();
  std::vector<double> T(d), R(d), next(d);
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::fill(T.begin(), T.end(), 0.0);
    std::fill(R.begin(), R.end(), 0.0);
    double denom = 0.0;
    double eta = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
      auto p = P.point(i);
      const double w = static_cast<double>(P.weight(i));
      const double di = dist(p, y);
      if (di <= coincide) {
        eta += w;
        continue;
      }
      denom += w / di;
      for (std::size_t j = 0; j < d; ++j) {
        T[j] += w * p[j] / di;
        R[j] += w * (p[j] - y[j]) / di;
      }
    }
    if (denom == 0.0) break;
    for (auto& x : T) x /= denom;
    if (eta == 0.0) {
      next = T;
    } else {
      // Vardi-Zhang: at a data point of weight eta, stay if the pull of the
      // others does not exceed eta, otherwise blend T with the current point.
      const double r = norm(R);
      if (r <= eta) break;
      const double lam = eta / r;
      for (std::size_t j = 0; j < d; ++j) next[j] = (1.0 - lam) * T[j] + lam * y[j];
    }
    const double step = dist(next, y);
    y.swap(next);
    if (step <= tol * scale) break;
  }
  return Point(std::move(y));
}

std::uint64_t partitions_at_most_k(std::size_t m, std::size_t k) {
  // Stirling numbers of the second kind, saturating.
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::vector<unsigned __int128>> S(m + 1, std::vector<unsigned __int128>(k + 1, 0));
  S[0][0] = 1;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= std::min(i, k); ++j) {
      S[i][j] = j * S[i - 1][j] + S[i - 1][j - 1];
      if (S[i][j] > kMax) S[i][j] = kMax;
    }
  }
  unsigned __int128 total = 0;
  for (std::size_t j = 1; j <= k; ++j) total += S[m][j];
  return total > kMax ? kMax : static_cast<std::uint64_t>(total);
}

double optcont_small(const WeightedPointSet& P, std::size_t k, PowerExponent z,
                     std::uint64_t budget) {
  require(k >= 1, ErrorCode::kInvalidArgument, "k must be >= 1");
  const std::size_t m = P.size();
  if (k >= m) return 0.0;
  const auto count = partitions_at_most_k(m, k);
  require(count <= budget, ErrorCode::kBudgetExceeded,
          "continuous optimum needs " + std::to_string(count) + " partitions, budget is " +
              std::to_string(budget));
  require(m <= 63, ErrorCode::kBudgetExceeded, "too many points for partition enumeration");

  std::unordered_map<std::uint64_t, double> block_cost;
  auto cost_of = [&](std::uint64_t mask) {
    auto it = block_cost.find(mask);
    if (it != block_cost.end()) return it->second;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1) idx.push_back(i);
    }
    const auto block = P.subset(idx);
    const auto c = continuous_center(block, z);
    const double v = cost_to_point(block, c, z);
    block_cost.emplace(mask, v);
    return v;
  };

  // Restricted growth strings: label[0] = 0, label[i] <= max(label[<i]) + 1 < k.
  std::vector<std::size_t> label(m, 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> masks(k, 0);
  auto visit = [&](auto&& self, std::size_t i, std::size_t used) -> void {
    if (i == m) {
      double total = 0.0;
      for (std::size_t b = 0; b < used; ++b) total += cost_of(masks[b]);
      best = std::min(best, total);
      return;
    }
    const std::size_t limit = std::min(used + 1, k);
    for (std::size_t b = 0; b < limit; ++b) {
      masks[b] |= std::uint64_t{1} << i;
      label[i] = b;
      self(self, i + 1, std::max(used, b + 1));
      masks[b] &= ~(std::uint64_t{1} << i);
    }
  };
  visit(visit, 0, 0);
  return best;
}

}  // namespace medoidjl
