#include "medoidjl/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "medoidjl/experiment.hpp"
#include "medoidjl/instances.hpp"
#include "medoidjl/nets.hpp"
#include "medoidjl/pointset_io.hpp"
#include "medoidjl/report_json.hpp"
#include "medoidjl/stats.hpp"
#include "medoidjl/verify.hpp"

namespace medoidjl {

namespace {

using Json = nlohmann::ordered_json;

/// Creates the parent directory of an output path when it is missing.
void make_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
}

/// Writes `text` to `path`, or to `out` when path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    return;
  }
  make_parent(path);
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::kIo, "cannot write " + path);
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string pointset_text(const WeightedPointSet& s) {
  std::ostringstream o;
  write_pointset_csv(o, s);
  return o.str();
}

std::pair<std::string, double> parse_param(const std::string& kv) {
  const auto eq = kv.find('=');
  require(eq != std::string::npos && eq > 0, ErrorCode::kInvalidArgument,
          "parameter must look like key=value: " + kv);
  return {kv.substr(0, eq), parse_double(kv.substr(eq + 1))};
}

ClusteringInstance load_instance(const std::string& input, const std::string& candidates,
                                 std::size_t k, double z) {
  auto P = load_pointset_csv(input);
  if (candidates.empty()) return ClusteringInstance::discrete(std::move(P), k, PowerExponent(z));
  return ClusteringInstance(std::move(P), load_pointset_csv(candidates), k, PowerExponent(z));
}

struct Options {
  // gen
  std::string family;
  std::vector<std::string> params;
  std::uint64_t seed = 0;
  std::string out;
  std::string out_q;
  // shared
  std::string input;
  std::string candidates;
  std::size_t k = 2;
  double z = 1.0;
  std::size_t t = 0;
  // project
  std::string map_out;
  // net
  double rho = 0.0;
  // ddim
  std::size_t exact_max_ball = 12;
  std::size_t max_radii = 0;
  // opt
  std::string mode = "auto";
  std::uint64_t budget = kDefaultExactBudget;
  std::size_t restarts = 4;
  // verify
  std::string check;
  double eps = 0.25;
  double alpha = 100.0;
  double L = 4.0;
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  bool identity = false;
  std::size_t workers = 1;
  std::size_t center = 0;
  std::size_t probes = 1000;
  // stats
  std::string kind = "chi-square";
  std::vector<std::size_t> ts;
  std::vector<double> epss;
  double c_fit = 8.0;
  std::size_t mc_trials = 100000;
  // experiment
  std::string config;
  std::string summary;
};

int cmd_gen(const Options& o, std::ostream& out) {
  InstanceSpec spec;
  spec.family = o.family;
  for (const auto& kv : o.params) spec.params.insert(parse_param(kv));
  spec.seed = o.seed;
  const auto inst = generate(spec);
  emit(o.out, pointset_text(inst.P), out);
  if (!o.out_q.empty()) emit(o.out_q, pointset_text(inst.Q), out);
  if (!o.out.empty() && o.out != "-") {
    Json j;
    j["family"] = spec.family;
    j["points"] = inst.P.size();
    j["total_weight"] = inst.P.total_weight();
    j["dim"] = inst.P.dim();
    j["candidates"] = inst.Q.size();
    j["k"] = inst.k;
    j["z"] = inst.z.value();
    out << j.dump() << '\n';
  }
  return kExitOk;
}

int cmd_project(const Options& o, std::ostream& out) {
  const auto P = load_pointset_csv(o.input);
  require(o.t >= 1, ErrorCode::kInvalidArgument, "--t must be >= 1");
  const auto map = GaussianMap::sample(P.dim(), o.t, o.seed);
  emit(o.out, pointset_text(apply_set(map, P)), out);
  if (!o.map_out.empty()) {
    make_parent(o.map_out);
    std::ofstream f(o.map_out, std::ios::binary);
    require(static_cast<bool>(f), ErrorCode::kIo, "cannot write " + o.map_out);
    write_map_binary(f, map);
  }
  return kExitOk;
}

int cmd_net(const Options& o, std::ostream& out) {
  const auto P = load_pointset_csv(o.input);
  const auto net = build_net(P, o.rho);
  const auto valid = validate_net(net, P);
  Json j;
  j["rho"] = net.rho;
  j["members"] = net.member_indices;
  j["packing"] = valid.packing;
  j["covering"] = valid.covering;
  emit(o.out, j.dump(2), out);
  return kExitOk;
}

int cmd_ddim(const Options& o, std::ostream& out) {
  const auto P = load_pointset_csv(o.input);
  DdimOptions opts;
  opts.exact_max_ball = o.exact_max_ball;
  opts.max_radii_per_center = o.max_radii;
  emit(o.out, ddim_to_json(estimate_ddim(P, opts)), out);
  return kExitOk;
}

int cmd_opt(const Options& o, std::ostream& out) {
  const auto inst = load_instance(o.input, o.candidates, o.k, o.z);
  OptResult r;
  if (o.mode == "exact") {
    r = opt_exact(inst, o.budget);
  } else if (o.mode == "local") {
    r = opt_local(inst, o.restarts, o.seed);
  } else {
    r = opt_auto(inst, o.budget, o.seed);
  }
  Json j;
  j["value"] = r.value;
  j["centers"] = r.solution.center_indices;
  j["exact"] = r.exact;
  emit(o.out, j.dump(2), out);
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  auto inst = std::make_shared<const ClusteringInstance>(load_instance(o.input, o.candidates, o.k, o.z));
  CheckConfig cfg;
  cfg.name = o.check;
  cfg.eps = o.eps;
  cfg.alpha = o.alpha;
  cfg.L = o.L;
  cfg.budget = o.budget;
  cfg.center = o.center;
  cfg.probes = o.probes;
  const auto prepared = prepare_check(inst, cfg, o.base_seed);
  const std::size_t d = inst->P.dim();
  require(o.identity || o.t >= 1, ErrorCode::kInvalidArgument, "--t is required unless --identity");
  auto cell = [&](std::uint64_t seed) {
    const auto map = o.identity ? GaussianMap::identity(d) : GaussianMap::sample(d, o.t, seed);
    return evaluate_check(prepared, map);
  };
  const auto summary = run_trials(cell, o.trials, o.base_seed, o.workers);
  emit(o.out, summary_to_json(o.check, summary), out);
  if (!o.out.empty() && o.out != "-") {
    out << o.check << ": " << summary.successes << "/" << summary.trials << " passed (rate "
        << format_double(summary.success_rate) << ")\n";
  }
  return kExitOk;
}

int cmd_stats(const Options& o, std::ostream& out) {
  std::ostringstream csv;
  csv << "t,eps,estimate,stderr,bound\n";
  const auto ts = o.ts.empty() ? std::vector<std::size_t>{8} : o.ts;
  const auto es = o.epss.empty() ? std::vector<double>{0.25} : o.epss;
  for (auto t : ts) {
    for (auto e : es) {
      if (o.kind == "chi-square") {
        const auto est = chi_square_lower_tail(t, e, o.mc_trials, o.seed);
        const double bound = std::exp(-o.c_fit * e * e * static_cast<double>(t)) / static_cast<double>(t);
        csv << t << ',' << format_double(e) << ',' << format_double(est.probability) << ','
            << format_double(est.stderr_) << ',' << format_double(bound) << '\n';
      } else if (o.kind == "excess") {
        const std::vector<double> p{1.0}, q{0.0};
        const auto est = expected_excess_distortion(p, q, o.z, t, e, o.mc_trials, o.seed);
        csv << t << ',' << format_double(e) << ',' << format_double(est.mean) << ','
            << format_double(est.stderr_) << ",\n";
      } else {
        fail(ErrorCode::kInvalidArgument, "unknown stats kind: " + o.kind);
      }
    }
  }
  emit(o.out, csv.str(), out);
  return kExitOk;
}

int cmd_experiment(const Options& o, std::ostream& out) {
  auto config = load_config(o.config);
  if (o.workers > 0) config.workers = o.workers;
  if (!o.out.empty()) config.output = o.out;
  if (!o.summary.empty()) config.summary = o.summary;
  const auto result = run_experiment(config);
  std::ostringstream csv;
  write_results_csv(csv, result);
  emit(config.output, csv.str(), out);
  std::string summary_path = config.summary;
  if (summary_path.empty() && config.output != "-") {
    const auto dot = config.output.rfind('.');
    summary_path = (dot == std::string::npos ? config.output : config.output.substr(0, dot)) + ".json";
  }
  if (!summary_path.empty()) emit(summary_path, summary_json(config, result), out);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random projections for discrete and candidate-center clustering", "medoidjl"};
  app.require_subcommand(1);
  Options o;
  o.workers = 0;

  auto* gen = app.add_subcommand("gen", "generate an instance as point CSV");
  gen->add_option("--family", o.family, "basis|decay|eps-decay|candidate|pairs|kernel|doubling")
      ->required();
  gen->add_option("--param", o.params, "key=value (n, k, z, s, d, eps, ddim, spread)");
  gen->add_option("--seed", o.seed);
  gen->add_option("--out", o.out, "point CSV for P (default stdout)");
  gen->add_option("--out-q", o.out_q, "point CSV for the candidates Q");

  auto* project = app.add_subcommand("project", "apply a sampled Gaussian map");
  project->add_option("--input", o.input)->required();
  project->add_option("--t", o.t)->required();
  project->add_option("--seed", o.seed);
  project->add_option("--out", o.out);
  project->add_option("--map-out", o.map_out, "binary map file");

  auto* net = app.add_subcommand("net", "greedy rho-net of a point set");
  net->add_option("--input", o.input)->required();
  net->add_option("--rho", o.rho)->required();
  net->add_option("--out", o.out);

  auto* ddim = app.add_subcommand("ddim", "doubling dimension estimate");
  ddim->add_option("--input", o.input)->required();
  ddim->add_option("--exact-max-ball", o.exact_max_ball);
  ddim->add_option("--max-radii", o.max_radii);
  ddim->add_option("--out", o.out);

  auto* opt = app.add_subcommand("opt", "discrete (k, z)-clustering optimum");
  opt->add_option("--input", o.input)->required();
  opt->add_option("--candidates", o.candidates);
  opt->add_option("--k", o.k);
  opt->add_option("--z", o.z);
  opt->add_option("--mode", o.mode)->check(CLI::IsMember({"exact", "local", "auto"}));
  opt->add_option("--budget", o.budget);
  opt->add_option("--restarts", o.restarts);
  opt->add_option("--seed", o.seed);
  opt->add_option("--out", o.out);

  auto* verify = app.add_subcommand("verify", "run a guarantee check over seeded maps");
  verify->add_option("--check", o.check)->required()->check(CLI::IsMember(known_checks()));
  verify->add_option("--input", o.input)->required();
  verify->add_option("--candidates", o.candidates);
  verify->add_option("--k", o.k);
  verify->add_option("--z", o.z);
  verify->add_option("--t", o.t);
  verify->add_option("--eps", o.eps);
  verify->add_option("--alpha", o.alpha);
  verify->add_option("--L", o.L);
  verify->add_option("--budget", o.budget);
  verify->add_option("--center", o.center);
  verify->add_option("--probes", o.probes);
  verify->add_option("--trials", o.trials);
  verify->add_option("--base-seed", o.base_seed);
  verify->add_option("--workers", o.workers);
  verify->add_flag("--identity", o.identity, "use G = I instead of sampled maps");
  verify->add_option("--out", o.out, "report JSON (default stdout)");

  auto* stats = app.add_subcommand("stats", "distribution checks as CSV");
  stats->add_option("--kind", o.kind)->check(CLI::IsMember({"chi-square", "excess"}));
  stats->add_option("--t", o.ts);
  stats->add_option("--eps", o.epss);
  stats->add_option("--z", o.z);
  stats->add_option("--trials", o.mc_trials);
  stats->add_option("--seed", o.seed);
  stats->add_option("--c", o.c_fit, "constant of the e^{-c eps^2 t}/t bound column");
  stats->add_option("--out", o.out);

  auto* experiment = app.add_subcommand("experiment", "run a TOML or JSON experiment config");
  experiment->add_option("--config", o.config)->required();
  experiment->add_option("--workers", o.workers);
  experiment->add_option("--out", o.out, "result CSV (overrides the config)");
  experiment->add_option("--summary", o.summary, "summary JSON (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (o.workers == 0 && !experiment->parsed()) o.workers = 1;
    if (*gen) return cmd_gen(o, out);
    if (*project) return cmd_project(o, out);
    if (*net) return cmd_net(o, out);
    if (*ddim) return cmd_ddim(o, out);
    if (*opt) return cmd_opt(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*stats) return cmd_stats(o, out);
    if (*experiment) return cmd_experiment(o, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace medoidjl
