#pragma once

#include <string>

#include "medoidjl/nets.hpp"
#include "medoidjl/verify.hpp"

namespace medoidjl {

inline constexpr const char* kReportSchema = "guarantee-report/1";

/// {"schema", "check", "pass", "worst_ratio", "exact", "witness", "details"}
std::string report_to_json(const GuaranteeReport& r, int indent = 2);

/// {"schema", "trials", "successes", "rate", "reports": [...]}
std::string summary_to_json(const std::string& check, const TrialSummary& s, int indent = 2);

/// {"schema", "pass", "worst_load", "events": [...], "levels": [...]}
std::string good_events_to_json(const GoodEventsReport& r, int indent = 2);

/// {"ddim", "method", "witness_center", "witness_radius", "witness_cover"}
std::string ddim_to_json(const DdimEstimate& e, int indent = 2);

}  // namespace medoidjl
