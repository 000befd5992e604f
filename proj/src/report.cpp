#include "susci/report.hpp"

#include "susci/plots.hpp"
#include "susci/sus_core.hpp"

namespace susci::report {

namespace {

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json bca_json(const BcaDetails& d) {
  return {{"bias_proportion", d.bias_proportion},
          {"bias", d.bias},
          {"acceleration", d.acceleration},
          {"tail_probability", d.tail_probability},
          {"alpha1", d.alpha1},
          {"alpha2", d.alpha2},
          {"lower_rank", d.lower_rank},
          {"upper_rank", d.upper_rank},
          {"percentile_fallback", d.percentile_fallback}};
}

nlohmann::json envelope(std::string_view kind) {
  return {{"schema_version", kSchemaVersion}, {"kind", kind}};
}

}  // namespace

nlohmann::json to_json(const Warning& w) { return {{"code", w.code}, {"message", w.message}}; }

nlohmann::json to_json(const Interval& iv) {
  nlohmann::json warnings = nlohmann::json::array();
  for (const auto& w : iv.warnings) warnings.push_back(to_json(w));
  return {{"method", method_tag(iv.method)},
          {"lower", iv.lower},
          {"upper", iv.upper},
          {"level", iv.level},
          {"width", iv.diagnostics.width},
          {"violates_lower", iv.diagnostics.violates_lower},
          {"violates_upper", iv.diagnostics.violates_upper},
          {"degenerate", iv.diagnostics.degenerate},
          {"warnings", std::move(warnings)},
          {"bca", iv.bca ? bca_json(*iv.bca) : nlohmann::json(nullptr)}};
}

nlohmann::json to_json(const MethodPlan& plan) {
  nlohmann::json rec = nlohmann::json::array();
  for (Method m : plan.recommended) rec.push_back(method_tag(m));
  return {{"rule_fired", rule_tag(plan.rule_fired)},
          {"recommended", std::move(rec)},
          {"rationale", plan.rationale},
          {"caveat", optional_json(plan.caveat)}};
}

nlohmann::json to_json(const LabelSpan& span) {
  return {{"scale", span.scale},
          {"lower_label", span.lower_label},
          {"upper_label", span.upper_label},
          {"bands_touched", span.bands_touched},
          {"lower_percentile", optional_json(span.lower_percentile)},
          {"upper_percentile", optional_json(span.upper_percentile)},
          {"clamped", span.clamped}};
}

nlohmann::json to_json(const SummaryStats& s) {
  return {{"n", s.n},
          {"mean", s.mean},
          {"sd", optional_json(s.sd)},
          {"skewness", optional_json(s.skewness)},
          {"min", s.min},
          {"max", s.max}};
}

nlohmann::json to_json(const ValidationIssue& issue) {
  return {{"row", issue.row},
          {"column", issue.column},
          {"field", issue.field},
          {"message", issue.message}};
}

nlohmann::json analysis_json(const AnalysisResult& result, const ReportOptions& options) {
  nlohmann::json j = envelope("analysis");
  j["seed"] = result.seed;
  nlohmann::json study = to_json(result.study.summary);
  study["scores"] = result.study.scores;
  j["study"] = std::move(study);
  j["plan"] = to_json(result.plan);

  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& o : result.intervals) {
    nlohmann::json iv = to_json(o.interval);
    iv["recommended"] = o.recommended;
    intervals.push_back(std::move(iv));
  }
  j["intervals"] = std::move(intervals);
  j["selected"] = to_json(result.selected);
  j["method_explicit"] = result.method_was_explicit;
  j["scale"] = options.primary_scale;

  nlohmann::json labels = nlohmann::json::array();
  for (const auto& span : result.labels) labels.push_back(to_json(span));
  j["labels"] = std::move(labels);

  if (result.posterior) {
    j["posterior"] = {{"mean", result.posterior->mean}, {"mode", result.posterior->mode}};
  } else {
    j["posterior"] = nullptr;
  }

  if (options.include_plots) {
    const LabelScale* scale = find_scale(builtin_scales(), options.primary_scale);
    if (!scale) scale = &builtin_scales().front();
    j["plots"] = {{"score_frequency", plots::score_frequency_json(result.study.scores)},
                  {"interval_bands", plots::interval_bands_json(result, *scale)},
                  {"posterior_mu", plots::posterior_json(result)}};
  } else {
    j["plots"] = nullptr;
  }

  nlohmann::json warnings = nlohmann::json::array();
  for (const auto& w : result.warnings) warnings.push_back(to_json(w));
  j["warnings"] = std::move(warnings);
  return j;
}

nlohmann::json scores_json(std::span<const double> scores) {
  nlohmann::json j = envelope("scores");
  j["scores"] = std::vector<double>(scores.begin(), scores.end());
  j["study"] = scores.empty() ? nlohmann::json(nullptr) : to_json(study_summary(scores).summary);
  return j;
}

nlohmann::json enumeration_json(std::size_t n) {
  const FeasibleMeanCounts counts = feasible_mean_counts(n);
  nlohmann::json j = envelope("enumeration");
  j["n"] = n;
  // Arbitrary precision, so serialised as a decimal string.
  j["combinations"] = counts.combinations.str();
  j["distinct_means"] = counts.distinct_means;
  return j;
}

nlohmann::json error_json(std::string_view code, std::string_view message,
                          std::span<const ValidationIssue> issues) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& issue : issues) list.push_back(to_json(issue));
  nlohmann::json j = envelope("error");
  j["error"] = {{"code", code}, {"message", message}, {"issues", std::move(list)}};
  return j;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace susci::report
