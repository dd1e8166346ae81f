#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "medoidjl/error.hpp"
#include "medoidjl/experiment.hpp"

namespace medoidjl {
namespace {

const char* kToml = R"(
trials = 4
base_seed = 10

[instance]
family = "doubling"
seed = 3
k = 2
params = { n = 12, ddim = 2 }

[projection]
t = [4, 8, 16, 32]

[[checks]]
name = "contraction"
eps = 0.25

[[checks]]
name = "relaxed-contraction"
eps = 0.25
alpha = 100
)";

std::string csv_of(const ExperimentConfig& c) {
  std::ostringstream o;
  write_results_csv(o, run_experiment(c));
  return o.str();
}

std::size_t lines(const std::string& s) {
  std::size_t n = 0;
  for (char ch : s) n += ch == '\n';
  return n;
}

TEST(Config, TomlAndJsonAgree) {
  auto a = parse_config_toml(kToml);
  auto b = parse_config_json(R"({"trials": 4, "base_seed": 10,
    "instance": {"family": "doubling", "seed": 3, "k": 2, "params": {"n": 12, "ddim": 2}},
    "projection": {"t": [4, 8, 16, 32]},
    "checks": [{"name": "contraction", "eps": 0.25},
               {"name": "relaxed-contraction", "eps": 0.25, "alpha": 100}]})");
  EXPECT_EQ(a.trials, 4u);
  EXPECT_EQ(a.base_seed, 10u);
  EXPECT_EQ(a.projection.t, (std::vector<std::size_t>{4, 8, 16, 32}));
  EXPECT_EQ(a.instance.params.at("k"), 2.0);
  EXPECT_EQ(csv_of(a), csv_of(b));
}

TEST(Config, RejectsUnknownKeysAndChecks) {
  EXPECT_THROW(parse_config_toml("bogus = 1\n[instance]\nfamily='basis'\n"), Error);
  EXPECT_THROW(parse_config_json(R"({"instance": {"family": "basis"}, "projection": {"t": 4},
    "checks": [{"name": "wat"}]})"), Error);
  EXPECT_THROW(parse_config_json(R"({"instance": {"family": "basis"}, "checks": [{"name": "expansion"}]})"),
               Error);
  try {
    parse_config_toml("[instance\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(RunExperiment, RowCountHeaderAndOrder) {
  auto c = parse_config_toml(kToml);
  const auto csv = csv_of(c);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
  EXPECT_EQ(lines(csv), 1 + 2 * 4 * 4u);  // 4 rows per t per check
  auto r = run_experiment(c);
  EXPECT_EQ(r.rows[0].check, "contraction");
  EXPECT_EQ(r.rows[0].t, 4u);
  EXPECT_EQ(r.rows[3].seed, 13u);
  EXPECT_EQ(r.rows[4].t, 8u);
  EXPECT_FALSE(r.rows[0].alpha.has_value());
  EXPECT_EQ(r.rows[16].alpha, 100.0);
  for (const auto& row : r.rows) EXPECT_EQ(row.runtime_ms, 0.0);
}

TEST(RunExperiment, DeterministicAcrossWorkers) {
  auto c = parse_config_toml(kToml);
  const auto one = csv_of(c);
  c.workers = 3;
  EXPECT_EQ(csv_of(c), one);
  EXPECT_EQ(csv_of(c), one);
}

TEST(RunExperiment, IdentityPassesEveryContractionRow) {
  auto c = parse_config_toml(kToml);
  c.projection.identity = true;
  c.trials = 1;
  c.checks.push_back(CheckConfig{"expansion"});
  for (const auto& row : run_experiment(c).rows) {
    ASSERT_TRUE(row.pass.has_value());
    EXPECT_TRUE(*row.pass) << row.check;
    EXPECT_EQ(row.t, 8u);
  }
}

TEST(RunExperiment, RecipeAndSummary) {
  auto c = parse_config_toml(kToml);
  c.projection.t.clear();
  c.projection.recipe = RecipeVariant::kForAllCentersPartitions;
  c.projection.ddim = 2;
  c.projection.c_const = kCalibratedCConst;
  auto r = run_experiment(c);
  DimensionRecipe rec;
  rec.eps = 0.25;
  rec.ddim = 2;
  rec.k = 2;
  rec.n = 12;
  rec.c_const = kCalibratedCConst;
  EXPECT_EQ(r.rows[0].t, target_dimension(rec));
  auto j = nlohmann::json::parse(summary_json(c, r));
  EXPECT_EQ(j["contraction"]["trials"], 4);
  EXPECT_EQ(j["contraction"]["threshold"], 2.0 / 3.0);
  std::size_t succ = 0;
  for (const auto& row : r.rows) succ += row.check == "contraction" && row.pass && *row.pass;
  EXPECT_EQ(j["contraction"]["successes"], succ);
}

TEST(RunExperiment, BudgetRefusalLeavesPassEmpty) {
  auto c = parse_config_toml(kToml);
  // preserve-sum needs every partition of P into <= k blocks: 2^11 here.
  c.checks = {CheckConfig{"preserve-sum"}};
  c.checks[0].budget = 3;
  c.trials = 1;
  c.projection.t = {4};
  auto r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_FALSE(r.rows[0].pass.has_value());
  std::ostringstream o;
  write_results_csv(o, r);
  EXPECT_NE(o.str().find("preserve-sum,10,4,0.25,,,nan,0"), std::string::npos);
}

TEST(PrepareCheck, EveryKnownCheckRuns) {
  auto inst = std::make_shared<const ClusteringInstance>(
      generate(InstanceSpec{"doubling", {{"n", 16}, {"k", 2}}, 1}));
  for (const auto& name : known_checks()) {
    CheckConfig cfg{name};
    cfg.probes = 50;
    auto ctx = prepare_check(inst, cfg, 0);
    auto rep = evaluate_check(ctx, GaussianMap::identity(inst->P.dim()));
    EXPECT_TRUE(rep.pass) << name;
  }
  EXPECT_EQ(check_threshold("fixed-solution-expansion"), 0.9);
}

}  // namespace
}  // namespace medoidjl
