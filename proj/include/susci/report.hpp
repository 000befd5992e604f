#pragma once

// JSON serialisation of analysis results and errors. Output conforms to
// data/result_schema.json, which is also served at /api/schema.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "susci/decision.hpp"
#include "susci/errors.hpp"

namespace susci::report {

inline constexpr std::string_view kSchemaVersion = "1.0.0";

nlohmann::json to_json(const Warning& w);
nlohmann::json to_json(const Interval& iv);
nlohmann::json to_json(const MethodPlan& plan);
nlohmann::json to_json(const LabelSpan& span);
nlohmann::json to_json(const SummaryStats& s);
nlohmann::json to_json(const ValidationIssue& issue);

struct ReportOptions {
  std::string primary_scale = "acceptability";
  bool include_plots = true;
};

nlohmann::json analysis_json(const AnalysisResult& result, const ReportOptions& options = {});
nlohmann::json scores_json(std::span<const double> scores);
nlohmann::json enumeration_json(std::size_t n);

// code: "validation", "semantic", "too-large", "usage", "config", "internal".
nlohmann::json error_json(std::string_view code, std::string_view message,
                          std::span<const ValidationIssue> issues = {});

// Consistent dump used by the CLI and the service (2-space indent).
std::string dump(const nlohmann::json& j);

}  // namespace susci::report
