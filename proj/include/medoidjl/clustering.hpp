#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "medoidjl/geometry.hpp"
#include "medoidjl/projection.hpp"

namespace medoidjl {

/// Data P, candidate centers Q (Q = P for the discrete variant), k, z.
struct ClusteringInstance {
  WeightedPointSet P;
  WeightedPointSet Q;
  std::size_t k = 1;
  PowerExponent z{1.0};

  ClusteringInstance(WeightedPointSet p, WeightedPointSet q, std::size_t k_, PowerExponent z_);
  /// Discrete variant, Q = P.
  static ClusteringInstance discrete(WeightedPointSet p, std::size_t k, PowerExponent z);
};

/// Image instance (G(P), G(Q)) with the same k, z and index correspondence.
ClusteringInstance project(const ClusteringInstance& inst, const GaussianMap& map);

struct Solution {
  std::vector<std::size_t> center_indices;  // into Q, distinct
  /// Optional: P index -> slot in center_indices.
  std::optional<std::vector<std::size_t>> partition;
};

struct OptResult {
  double value = 0.0;
  Solution solution;
  bool exact = false;
};

/// Weighted powered distances w_p * |p - q|^z for every p in P, q in Q.
class CostTable {
 public:
  CostTable(const WeightedPointSet& P, const WeightedPointSet& Q, PowerExponent z);
  explicit CostTable(const ClusteringInstance& inst) : CostTable(inst.P, inst.Q, inst.z) {}
  /// Arbitrary row-major rows x cols values (may be negative).
  static CostTable from_values(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const noexcept { return n_; }
  std::size_t cols() const noexcept { return m_; }
  double operator()(std::size_t p, std::size_t q) const { return v_[p * m_ + q]; }
  const double* row(std::size_t p) const { return v_.data() + p * m_; }

 private:
  CostTable() = default;
  std::size_t n_ = 0, m_ = 0;
  std::vector<double> v_;
};

/// sum_p w_p * min_{c in C} |p - c|^z
double cost(const ClusteringInstance& inst, std::span<const std::size_t> centers);
double cost(const CostTable& table, std::span<const std::size_t> centers);

/// sum_i sum_{p in S_i} w_p |p - c_i|^z for partition p -> slot.
double cost_partition(const ClusteringInstance& inst, std::span<const std::size_t> partition,
                      std::span<const std::size_t> centers);

/// Nearest center slot per P point (lowest slot on ties), in source space.
std::vector<std::size_t> assign_source(const ClusteringInstance& inst,
                                       std::span<const std::size_t> centers);
/// Nearest center slot per P point measured between images G p and G c.
std::vector<std::size_t> assign_target(const ClusteringInstance& inst,
                                       std::span<const std::size_t> centers,
                                       const GaussianMap& map);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

inline constexpr std::uint64_t kDefaultExactBudget = 2'000'000;

/// Exhaustive search over k-subsets of Q (k clipped to |Q|); ties go to the
/// lexicographically smallest sorted index tuple. Throws kBudgetExceeded when
/// C(|Q|, k) > budget.
OptResult opt_exact(const ClusteringInstance& inst, std::uint64_t budget = kDefaultExactBudget);
OptResult opt_exact(const CostTable& table, std::size_t k,
                    std::uint64_t budget = kDefaultExactBudget);

/// Farthest-point seeding from Q followed by best-improvement single swaps
/// until no swap lowers the cost. Restarts after the first use a random
/// first center. exact = false.
OptResult opt_local(const ClusteringInstance& inst, std::size_t restarts, std::uint64_t seed);

/// Exact when affordable, local search otherwise; `exact` tells which.
OptResult opt_auto(const ClusteringInstance& inst, std::uint64_t budget = kDefaultExactBudget,
                   std::uint64_t seed = 0);

/// Optimal continuous 1-center for z in {1, 2}: weighted centroid for z = 2,
/// Weiszfeld iteration (Vardi-Zhang modification at data points) for z = 1,
/// stopped when a step moves less than tol relative to the spread of P.
Point continuous_center(const WeightedPointSet& P, PowerExponent z, double tol = 1e-12,
                        std::size_t max_iter = 100000);

/// sum_p w_p |p - c|^z
double cost_to_point(const WeightedPointSet& P, Coords c, PowerExponent z);

/// Number of set partitions of m items into at most k nonempty blocks.
std::uint64_t partitions_at_most_k(std::size_t m, std::size_t k);

/// Continuous (k, z) optimum by enumerating every partition of the distinct
/// points into at most k blocks. Throws kBudgetExceeded past `budget`
/// partitions.
double optcont_small(const WeightedPointSet& P, std::size_t k, PowerExponent z,
                     std::uint64_t budget = 200'000);

}  // namespace medoidjl
