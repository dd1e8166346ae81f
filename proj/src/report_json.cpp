#include "medoidjl/report_json.hpp"

#include "json.hpp"

namespace medoidjl {

namespace {

using Json = nlohmann::ordered_json;

Json witness_json(const Witness& w) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, Solution>) {
          Json j;
          j["kind"] = "solution";
          j["centers"] = v.center_indices;
          if (v.partition) j["partition"] = *v.partition;
          return j;
        } else if constexpr (std::is_same_v<T, SubsetWitness>) {
          Json j;
          j["kind"] = "subset";
          j["indices"] = v.indices;
          return j;
        } else if constexpr (std::is_same_v<T, PairWitness>) {
          Json j;
          j["kind"] = "pair";
          j["first"] = v.first;
          j["second"] = v.second;
          return j;
        } else {
          Json j;
          j["kind"] = "point";
          j["coords"] = std::vector<double>(v.coords().begin(), v.coords().end());
          return j;
        }
      },
      w);
}

Json report_json(const GuaranteeReport& r) {
  Json j;
  j["schema"] = kReportSchema;
  j["check"] = r.check_name;
  j["pass"] = r.pass;
  j["worst_ratio"] = r.worst_ratio;
  j["exact"] = r.exact;
  j["witness"] = witness_json(r.witness);
  Json d = Json::object();
  for (const auto& [key, value] : r.details) d[key] = value;
  j["details"] = d;
  return j;
}

}  // namespace

std::string report_to_json(const GuaranteeReport& r, int indent) {
  return report_json(r).dump(indent);
}

std::string summary_to_json(const std::string& check, const TrialSummary& s, int indent) {
  Json j;
  j["schema"] = "trial-summary/1";
  j["check"] = check;
  j["trials"] = s.trials;
  j["successes"] = s.successes;
  j["rate"] = s.success_rate;
  j["seeds"] = s.seeds;
  Json reports = Json::array();
  for (const auto& r : s.reports) reports.push_back(report_json(r));
  j["reports"] = reports;
  return j.dump(indent);
}

std::string good_events_to_json(const GoodEventsReport& r, int indent) {
  Json j;
  j["schema"] = "good-events/1";
  j["pass"] = r.pass;
  j["worst_load"] = r.worst_load;
  Json events = Json::array();
  for (const auto& e : r.events) {
    Json ej;
    ej["event"] = e.name;
    ej["pass"] = e.pass;
    ej["value"] = e.value;
    ej["bound"] = e.bound;
    ej["load"] = e.load;
    events.push_back(ej);
  }
  j["events"] = events;
  Json levels = Json::array();
  for (const auto& [level, bg] : r.level_stats) {
    Json lj;
    lj["level"] = level;
    lj["beta"] = bg.first;
    lj["gamma"] = bg.second;
    levels.push_back(lj);
  }
  j["levels"] = levels;
  return j.dump(indent);
}

std::string ddim_to_json(const DdimEstimate& e, int indent) {
  Json j;
  j["ddim"] = e.value;
  j["method"] = to_string(e.method);
  j["witness_center"] = e.witness_center;
  j["witness_radius"] = e.witness_radius;
  j["witness_cover"] = e.witness_cover;
  return j.dump(indent);
}

}  // namespace medoidjl
