#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "medoidjl/instances.hpp"
#include "medoidjl/projection.hpp"
#include "medoidjl/verify.hpp"

namespace medoidjl {

/// Names accepted in [[checks]].
inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = {
      "expansion",    "contraction",    "relaxed-contraction", "fixed-solution-expansion",
      "preserve-sum", "central-symmetric", "good-events"};
  return names;
}

struct CheckConfig {
  std::string name;
  double eps = 0.25;
  double alpha = 100.0;
  double L = 4.0;
  std::uint64_t budget = 2'000'000;
  /// preserve-sum: index into Q of the center c.
  std::size_t center = 0;
  /// central-symmetric: random probe centers.
  std::size_t probes = 1000;
};

struct ProjectionConfig {
  /// Explicit target dimensions; each one is run for every check.
  std::vector<std::size_t> t;
  /// Otherwise t = target_dimension(recipe) with the check's eps and alpha.
  std::optional<RecipeVariant> recipe;
  double c_const = 1.0;
  /// Doubling dimension for the recipe; estimated from P u Q when absent.
  std::optional<double> ddim;
  /// Use G = I (t = d) instead of sampled maps.
  bool identity = false;
};

struct ExperimentConfig {
  InstanceSpec instance;
  ProjectionConfig projection;
  std::vector<CheckConfig> checks;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  std::size_t workers = 1;
  /// Record wall-clock runtime_ms; off keeps the CSV byte-reproducible.
  bool timing = false;
  std::string output = "results.csv";
  std::string summary;  // empty: output with .json extension
};

/// Parses a config from TOML or JSON text. Throws kParse / kInvalidArgument.
ExperimentConfig parse_config_toml(const std::string& text);
ExperimentConfig parse_config_json(const std::string& text);
/// Chooses the parser by extension (.toml or .json).
ExperimentConfig load_config(const std::string& path);

struct ResultRow {
  std::string check;
  std::uint64_t seed = 0;
  std::size_t t = 0;
  double eps = 0.0;
  std::optional<double> alpha;
  /// nullopt when the check could not be evaluated (budget exceeded).
  std::optional<bool> pass;
  double worst_ratio = 0.0;
  double runtime_ms = 0.0;
  bool exact = true;
};

inline constexpr const char* kCsvHeader = "check,seed,t,eps,alpha,pass,worst_ratio,runtime_ms";

struct ExperimentResult {
  std::vector<ResultRow> rows;  // ordered by check, then t, then seed
};

/// Runs every (check, t, trial) cell; deterministic given the config.
ExperimentResult run_experiment(const ExperimentConfig& config);

void write_results_csv(std::ostream& out, const ExperimentResult& result);
/// {check: {trials, successes, rate, threshold, meets_threshold, by_t: {...}}}
std::string summary_json(const ExperimentConfig& config, const ExperimentResult& result);

/// Per-check state computed once and shared by every trial.
struct PreparedCheck {
  std::shared_ptr<const ClusteringInstance> inst;
  CheckConfig cfg;
  /// fixed-solution-expansion: the solution held fixed.
  std::optional<OptResult> fixed;
  /// central-symmetric: P symmetrized about its centroid.
  std::optional<WeightedPointSet> sym;
  std::optional<Point> sym_center;
  std::shared_ptr<const GoodEventsSetup> events;
};

PreparedCheck prepare_check(std::shared_ptr<const ClusteringInstance> inst, const CheckConfig& cfg,
                            std::uint64_t seed = 0);

/// One trial of a prepared check under `map`.
GuaranteeReport evaluate_check(const PreparedCheck& check, const GaussianMap& map);

/// Success-rate threshold a check is compared against (2/3, or 9/10 for the
/// fixed-solution check).
double check_threshold(const std::string& check);

}  // namespace medoidjl
