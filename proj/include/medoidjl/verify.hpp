#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "medoidjl/clustering.hpp"
#include "medoidjl/nets.hpp"
#include "medoidjl/projection.hpp"

namespace medoidjl {

/// Indices of a subset of P.
struct SubsetWitness {
  std::vector<std::size_t> indices;
};

/// The pair of points realizing a report's ratio (indices into the checked set).
struct PairWitness {
  std::size_t first = 0;
  std::size_t second = 0;
};

using Witness = std::variant<std::monostate, Solution, SubsetWitness, PairWitness, Point>;

struct GuaranteeReport {
  std::string check_name;
  bool pass = false;
  double worst_ratio = 1.0;
  /// False when an optimum came from local search or center sets were sampled.
  bool exact = true;
  Witness witness;
  std::map<std::string, double> details;
};

struct CheckOptions {
  std::uint64_t budget = kDefaultExactBudget;
  /// Random center sets drawn when C(|Q|, k) exceeds the budget; repeated
  /// draws are examined once.
  std::size_t sampled_sets = 2000;
  std::uint64_t sample_seed = 0;
};

/// opt(G(P), G(Q)) <= (1 + eps) opt(P, Q); worst_ratio = opt(G) / opt.
/// Witness: the optimal solution of the image instance.
GuaranteeReport check_expansion(const ClusteringInstance& inst, const GaussianMap& map, double eps,
                                const CheckOptions& options = {});

/// For every k-subset C of Q and every partition of P:
/// cost(G(partition), G(C)) >= (1 - eps) cost(partition, C). The worst partition
/// for a fixed C sends each point to the slot minimizing
/// w_p (|Gp - Gc_i|^z - (1 - eps)|p - c_i|^z). worst_ratio is the minimum of the
/// cost ratio over all C and partitions. Witness: the minimizing (C, partition).
/// details["min_slack"] is the minimum over C of the summed per-point minimum.
GuaranteeReport check_contraction_all_centers_partitions(const ClusteringInstance& inst,
                                                         const GaussianMap& map, double eps,
                                                         const CheckOptions& options = {});

/// For every k-subset C of Q, with P assigned to the nearest image center:
/// cost(G(P), G(C)) >= min{alpha opt(P, Q), (1 - eps) cost(P, C)}.
/// worst_ratio = min over C of cost(G(P), G(C)) / min{...}. details counts the
/// sets in each branch of the min ("alpha_branch", "eps_branch") and failures.
GuaranteeReport check_relaxed_contraction(const ClusteringInstance& inst, const GaussianMap& map,
                                          double eps, double alpha, const CheckOptions& options = {});

/// Worst subset P' of P for
/// sum_{P'} |Gp - Gc|^z >= (1 - eps)^{3z} sum_{P'} |p - c|^z - slack,
/// taken in closed form as the points with negative weighted margin.
/// worst_ratio = (lhs + slack) / rhs-without-slack, 1 when the subset is empty.
GuaranteeReport check_preserve_sum_slack(const WeightedPointSet& P, Coords c, PowerExponent z,
                                         double eps, const GaussianMap& map, double slack);

/// As above with slack = (eps / k^2) optcont(P) from optcont_small.
GuaranteeReport check_preserve_sum(const WeightedPointSet& P, Coords c, std::size_t k,
                                   PowerExponent z, double eps, const GaussianMap& map,
                                   std::uint64_t optcont_budget = 200'000);

/// Symmetrization X u (2c - X) with the weights of X.
WeightedPointSet symmetrize(const WeightedPointSet& X, Coords c);

/// Throws kNotSymmetric unless every x has 2c - x in X with the same weight
/// (matched within rel_tol times the extent of X).
void require_symmetric(const WeightedPointSet& X, Coords c, double rel_tol = 1e-9);

/// c is an optimal continuous 1-center of a set symmetric about c: its cost is
/// compared with continuous_center(X, z) and with `probes` random centers.
/// worst_ratio = min competitor cost / cost(X, c); witness = best competitor.
GuaranteeReport check_central_symmetric(const WeightedPointSet& X, Coords c, PowerExponent z,
                                        std::size_t probes = 1000, std::uint64_t seed = 0);

/// cost(G(partition), G(C)) <= (1 + eps) cost(partition, C) for one fixed
/// solution; worst_ratio = image cost / source cost.
GuaranteeReport check_fixed_solution_expansion(const ClusteringInstance& inst,
                                               std::span<const std::size_t> centers,
                                               std::span<const std::size_t> partition,
                                               const GaussianMap& map, double eps);

// Good-event diagnostics around an optimal solution C*.

struct GoodEventsParams {
  double eps = 0.25;
  double alpha = 100.0;
  double L = 4.0;
};

/// Optimal solution, levels and nets the diagnostics run on.
struct GoodEventsSetup {
  ClusteringInstance inst;
  OptResult opt;
  /// P index -> slot of its nearest optimal center.
  std::vector<std::size_t> clusters;
  /// Threshold level per slot; nullopt for an empty cluster.
  std::vector<std::optional<int>> threshold;
  /// j_p for every universe point of the hierarchy.
  std::vector<int> point_level;
  NetHierarchy hierarchy;
  GoodEventsParams params;

  int buffer_low(std::size_t slot) const;
  int buffer_high(std::size_t slot) const;
};

/// Solves the instance exactly, computes thresholds and builds the nets over
/// every level touched by a point or a buffer.
GoodEventsSetup prepare_good_events(const ClusteringInstance& inst, const GoodEventsParams& params,
                                    std::uint64_t budget = kDefaultExactBudget);

struct EventResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
  /// value / bound for upper-bound events, bound / value for lower-bound
  /// events; at most 1 when the event holds (below 1 strictly for f and g).
  double load = 0.0;
};

struct GoodEventsReport {
  bool pass = false;
  /// Largest event load.
  double worst_load = 0.0;
  std::vector<EventResult> events;
  /// Per level: beta and gamma.
  std::map<int, std::pair<double, double>> level_stats;
};

GoodEventsReport good_events_diagnostics(const GoodEventsSetup& setup, const GaussianMap& map);

/// Empirical success rate of a seeded check.
struct TrialSummary {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<GuaranteeReport> reports;  // in seed order
};

using SeededCheck = std::function<GuaranteeReport(std::uint64_t seed)>;

/// Runs check(base_seed + i) for i < trials on `workers` threads; results are
/// stored in seed order regardless of scheduling.
TrialSummary run_trials(const SeededCheck& check, std::size_t trials, std::uint64_t base_seed,
                        std::size_t workers = 1);

/// One-sided lower confidence bound on a binomial rate (Wilson score).
double wilson_lower(std::size_t successes, std::size_t trials, double z_score = 1.6448536269514722);

}  // namespace medoidjl
