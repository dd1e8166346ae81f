#include "medoidjl/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "medoidjl/nets.hpp"
#include "medoidjl/pointset_io.hpp"
#include "medoidjl/verify.hpp"
#include "toml.hpp"

namespace medoidjl {

namespace {

using Json = nlohmann::json;

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("config key '") + key + "': " + e.what());
  }
}

std::size_t get_count(const Json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  require(v.is_number_integer() && v.get<long long>() >= 0, ErrorCode::kInvalidArgument,
          std::string("config key '") + key + "' must be a nonnegative integer");
  return v.get<std::size_t>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return key == a; });
    require(ok, ErrorCode::kInvalidArgument, "unknown key '" + key + "' in " + where);
  }
}

ExperimentConfig from_json(const Json& root) {
  require(root.is_object(), ErrorCode::kInvalidArgument, "config must be a table");
  reject_unknown(root,
                 {"instance", "projection", "checks", "trials", "base_seed", "workers", "timing",
                  "output", "summary"},
                 "config");
  ExperimentConfig c;
  require(root.contains("instance"), ErrorCode::kInvalidArgument, "config needs [instance]");
  const auto& inst = root.at("instance");
  reject_unknown(inst, {"family", "seed", "params", "k", "z"}, "[instance]");
  require(inst.contains("family"), ErrorCode::kInvalidArgument, "[instance] needs family");
  c.instance.family = inst.at("family").get<std::string>();
  if (inst.contains("seed")) c.instance.seed = get_count(inst, "seed", 0);
  if (inst.contains("params")) {
    for (const auto& [key, value] : inst.at("params").items()) {
      require(value.is_number(), ErrorCode::kInvalidArgument,
              "instance parameter '" + key + "' must be numeric");
      c.instance.params[key] = value.get<double>();
    }
  }
  if (inst.contains("k")) c.instance.params["k"] = static_cast<double>(get_count(inst, "k", 1));
  if (inst.contains("z")) c.instance.params["z"] = get_or<double>(inst, "z", 1.0);

  if (root.contains("projection")) {
    const auto& p = root.at("projection");
    reject_unknown(p, {"t", "recipe", "c_const", "ddim", "identity"}, "[projection]");
    if (p.contains("t")) {
      const auto& t = p.at("t");
      if (t.is_array()) {
        for (const auto& x : t) {
          require(x.is_number_integer() && x.get<long long>() >= 1, ErrorCode::kInvalidArgument,
                  "projection t values must be positive integers");
          c.projection.t.push_back(x.get<std::size_t>());
        }
      } else {
        c.projection.t.push_back(get_count(p, "t", 1));
      }
    }
    if (p.contains("recipe")) c.projection.recipe = parse_recipe_variant(p.at("recipe").get<std::string>());
    c.projection.c_const = get_or<double>(p, "c_const", 1.0);
    if (p.contains("ddim")) c.projection.ddim = get_or<double>(p, "ddim", 0.0);
    c.projection.identity = get_or<bool>(p, "identity", false);
  }
  const bool has_t = !c.projection.t.empty() || c.projection.recipe || c.projection.identity;
  require(has_t, ErrorCode::kInvalidArgument, "[projection] needs t, recipe or identity");

  require(root.contains("checks") && root.at("checks").is_array() && !root.at("checks").empty(),
          ErrorCode::kInvalidArgument, "config needs at least one [[checks]] entry");
  for (const auto& cj : root.at("checks")) {
    reject_unknown(cj, {"name", "eps", "alpha", "L", "budget", "center", "probes"}, "[[checks]]");
    CheckConfig cc;
    require(cj.contains("name"), ErrorCode::kInvalidArgument, "every check needs a name");
    cc.name = cj.at("name").get<std::string>();
    const auto& names = known_checks();
    require(std::find(names.begin(), names.end(), cc.name) != names.end(),
            ErrorCode::kInvalidArgument, "unknown check: " + cc.name);
    cc.eps = get_or<double>(cj, "eps", cc.eps);
    cc.alpha = get_or<double>(cj, "alpha", cc.alpha);
    cc.L = get_or<double>(cj, "L", cc.L);
    cc.budget = get_count(cj, "budget", cc.budget);
    cc.center = get_count(cj, "center", cc.center);
    cc.probes = get_count(cj, "probes", cc.probes);
    require(cc.eps > 0.0 && cc.eps < 1.0, ErrorCode::kInvalidArgument, "check eps must lie in (0, 1)");
    c.checks.push_back(cc);
  }
  c.trials = get_count(root, "trials", 1);
  require(c.trials >= 1, ErrorCode::kInvalidArgument, "trials must be >= 1");
  c.base_seed = root.contains("base_seed") ? root.at("base_seed").get<std::uint64_t>() : 0;
  c.workers = std::max<std::size_t>(1, get_count(root, "workers", 1));
  c.timing = get_or<bool>(root, "timing", false);
  c.output = get_or<std::string>(root, "output", c.output);
  c.summary = get_or<std::string>(root, "summary", "");
  return c;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kParse, std::string("config JSON: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
}

ExperimentConfig parse_config_toml(const std::string& text) {
  toml::table tbl;
  try {
    tbl = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config TOML: " << e.description() << " at line " << e.source().begin.line;
    fail(ErrorCode::kParse, msg.str());
  }
  std::ostringstream js;
  js << toml::json_formatter{tbl};
  return parse_config_json(js.str());
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto ends_with = [&](const std::string& s) {
    return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with(".toml")) return parse_config_toml(buf.str());
  if (ends_with(".json")) return parse_config_json(buf.str());
  fail(ErrorCode::kInvalidArgument, "config must end in .toml or .json: " + path);
}

double check_threshold(const std::string& check) {
  return check == "fixed-solution-expansion" ? 0.9 : 2.0 / 3.0;
}

namespace {

bool uses_alpha(const std::string& check) {
  return check == "relaxed-contraction" || check == "good-events";
}

std::string format_row_double(double x);

}  // namespace

GuaranteeReport evaluate_check(const PreparedCheck& ctx, const GaussianMap& map) {
  const auto& inst = *ctx.inst;
  const auto& cfg = ctx.cfg;
  CheckOptions opts;
  opts.budget = cfg.budget;
  opts.sample_seed = map.seed();
  if (cfg.name == "expansion") return check_expansion(inst, map, cfg.eps, opts);
  if (cfg.name == "contraction") {
    return check_contraction_all_centers_partitions(inst, map, cfg.eps, opts);
  }
  if (cfg.name == "relaxed-contraction") {
    return check_relaxed_contraction(inst, map, cfg.eps, cfg.alpha, opts);
  }
  if (cfg.name == "preserve-sum") {
    require(cfg.center < inst.Q.size(), ErrorCode::kInvalidArgument, "preserve-sum center out of range");
    return check_preserve_sum(inst.P, inst.Q.point(cfg.center), inst.k, inst.z, cfg.eps, map,
                              cfg.budget);
  }
  if (cfg.name == "fixed-solution-expansion") {
    const auto& sol = ctx.fixed->solution;
    return check_fixed_solution_expansion(inst, sol.center_indices, *sol.partition, map, cfg.eps);
  }
  if (cfg.name == "central-symmetric") {
    const auto img = apply_set(map, *ctx.sym);
    const Point gc = apply(map, *ctx.sym_center);
    return check_central_symmetric(img, gc, inst.z, cfg.probes, map.seed());
  }
  // good-events
  const auto rep = good_events_diagnostics(*ctx.events, map);
  GuaranteeReport r;
  r.check_name = "good-events";
  r.pass = rep.pass;
  r.worst_ratio = rep.worst_load;
  r.exact = ctx.events->opt.exact;
  for (const auto& e : rep.events) r.details[e.name] = e.load;
  return r;
}

PreparedCheck prepare_check(std::shared_ptr<const ClusteringInstance> inst, const CheckConfig& cfg,
                            std::uint64_t seed) {
  PreparedCheck ctx;
  ctx.cfg = cfg;
  const auto names = known_checks();
  require(std::find(names.begin(), names.end(), cfg.name) != names.end(),
          ErrorCode::kInvalidArgument, "unknown check: " + cfg.name);
  const std::size_t d = inst->P.dim();
  if (cfg.name == "fixed-solution-expansion") ctx.fixed = opt_auto(*inst, cfg.budget, seed);
  if (cfg.name == "central-symmetric") {
    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < inst->P.size(); ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        centroid[j] += static_cast<double>(inst->P.weight(i)) * inst->P.point(i)[j];
      }
    }
    for (auto& x : centroid) x /= static_cast<double>(inst->P.total_weight());
    ctx.sym_center = Point(centroid);
    ctx.sym = symmetrize(inst->P, *ctx.sym_center);
  }
  if (cfg.name == "good-events") {
    ctx.events = std::make_shared<GoodEventsSetup>(
        prepare_good_events(*inst, GoodEventsParams{cfg.eps, cfg.alpha, cfg.L}, cfg.budget));
  }
  ctx.inst = std::move(inst);
  return ctx;
}

namespace {

std::string format_row_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return format_double(x);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto shared = std::make_shared<const ClusteringInstance>(generate(config.instance));
  const ClusteringInstance& inst = *shared;
  const std::size_t d = inst.P.dim();

  std::optional<double> ddim = config.projection.ddim;
  if (!ddim && config.projection.recipe && config.projection.t.empty() && !config.projection.identity) {
    std::vector<Point> all;
    for (std::size_t i = 0; i < inst.P.size(); ++i) all.push_back(inst.P.point_copy(i));
    for (std::size_t i = 0; i < inst.Q.size(); ++i) all.push_back(inst.Q.point_copy(i));
    ddim = estimate_ddim(WeightedPointSet::from_multiset(all, std::vector<std::uint64_t>(all.size(), 1))).value;
  }

  ExperimentResult result;
  for (const auto& cfg : config.checks) {
    const PreparedCheck ctx = prepare_check(shared, cfg, config.base_seed);

    std::vector<std::size_t> ts = config.projection.t;
    if (config.projection.identity) {
      ts = {d};
    } else if (ts.empty()) {
      DimensionRecipe rec;
      rec.variant = *config.projection.recipe;
      rec.eps = cfg.eps;
      rec.z = inst.z.value();
      rec.ddim = *ddim;
      rec.k = inst.k;
      rec.n = inst.P.total_weight();
      rec.s = inst.Q.size();
      rec.alpha = cfg.alpha;
      rec.c_const = config.projection.c_const;
      ts = {target_dimension(rec)};
    }

    for (auto t : ts) {
      std::vector<double> runtimes(config.trials, 0.0);
      std::vector<char> refused(config.trials, 0);
      auto cell = [&](std::uint64_t seed) {
        const auto start = std::chrono::steady_clock::now();
        const GaussianMap map =
            config.projection.identity ? GaussianMap::identity(d) : GaussianMap::sample(d, t, seed);
        GuaranteeReport r;
        try {
          r = evaluate_check(ctx, map);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kBudgetExceeded) throw;
          refused[seed - config.base_seed] = 1;
          r.check_name = cfg.name;
          r.exact = false;
          r.worst_ratio = std::nan("");
        }
        if (config.timing) {
          const auto stop = std::chrono::steady_clock::now();
          runtimes[seed - config.base_seed] =
              std::chrono::duration<double, std::milli>(stop - start).count();
        }
        return r;
      };
      const auto summary = run_trials(cell, config.trials, config.base_seed, config.workers);
      for (std::size_t i = 0; i < config.trials; ++i) {
        ResultRow row;
        row.check = cfg.name;
        row.seed = summary.seeds[i];
        row.t = t;
        row.eps = cfg.eps;
        if (uses_alpha(cfg.name)) row.alpha = cfg.alpha;
        if (!refused[i]) row.pass = summary.reports[i].pass;
        row.worst_ratio = summary.reports[i].worst_ratio;
        row.runtime_ms = std::round(runtimes[i] * 1000.0) / 1000.0;
        row.exact = summary.reports[i].exact;
        result.rows.push_back(row);
      }
    }
  }
  return result;
}

void write_results_csv(std::ostream& out, const ExperimentResult& result) {
  out << kCsvHeader << '\n';
  for (const auto& r : result.rows) {
    out << r.check << ',' << r.seed << ',' << r.t << ',' << format_row_double(r.eps) << ','
        << (r.alpha ? format_row_double(*r.alpha) : "") << ','
        << (r.pass ? (*r.pass ? "true" : "false") : "") << ',' << format_row_double(r.worst_ratio)
        << ',' << format_row_double(r.runtime_ms) << '\n';
  }
}

std::string summary_json(const ExperimentConfig& config, const ExperimentResult& result) {
  nlohmann::ordered_json root = nlohmann::ordered_json::object();
  for (const auto& cfg : config.checks) {
    std::size_t trials = 0, successes = 0, refused = 0, inexact = 0;
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> by_t;
    for (const auto& r : result.rows) {
      if (r.check != cfg.name) continue;
      ++trials;
      auto& bt = by_t[r.t];
      ++bt.first;
      if (!r.pass) ++refused;
      if (!r.exact) ++inexact;
      if (r.pass && *r.pass) {
        ++successes;
        ++bt.second;
      }
    }
    nlohmann::ordered_json j;
    j["trials"] = trials;
    j["successes"] = successes;
    const double rate = trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
    j["rate"] = rate;
    j["threshold"] = check_threshold(cfg.name);
    j["meets_threshold"] = rate >= check_threshold(cfg.name);
    j["refused"] = refused;
    j["inexact"] = inexact;
    nlohmann::ordered_json bt = nlohmann::ordered_json::object();
    for (const auto& [t, c] : by_t) {
      nlohmann::ordered_json e;
      e["trials"] = c.first;
      e["successes"] = c.second;
      e["rate"] = static_cast<double>(c.second) / static_cast<double>(c.first);
      bt[std::to_string(t)] = e;
    }
    j["by_t"] = bt;
    root[cfg.name] = j;
  }
  return root.dump(2);
}

}  // namespace medoidjl
