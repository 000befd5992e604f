#pragma once

// Sample-size decision rules, interval selection, and label-scale mapping.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "susci/bayes.hpp"
#include "susci/intervals.hpp"
#include "susci/sus_core.hpp"

namespace susci {

enum class Rule { Rule1_nLE5, Rule2_n6to8, Rule3_nGE9 };
std::string_view rule_tag(Rule rule);

// Caveat attached whenever the Bayes interval is recommended.
inline constexpr std::string_view kBayesCaveat =
    "assumes the current study's SUS scores are likely similar to those collected in the past";

struct MethodPlan {
  std::vector<Method> recommended;
  Rule rule_fired = Rule::Rule1_nLE5;
  std::string rationale;
  std::optional<std::string> caveat;

  bool recommends(Method m) const;
};

MethodPlan recommend(std::size_t n);

struct Band {
  std::string label;
  double lower = 0.0;
  double upper = 0.0;
};

struct PercentileAnchor {
  double score = 0.0;
  double percentile = 0.0;
};

struct LabelScale {
  std::string name;
  std::vector<Band> bands;                 // empty for anchor scales
  std::vector<PercentileAnchor> anchors;   // percentile scale only
  std::string provenance;

  bool is_percentile() const noexcept { return !anchors.empty(); }
};

// Parses and validates a JSON array of scales. Throws ConfigError when bands
// do not partition [0, 100] or anchors are not monotone over [0, 100].
std::vector<LabelScale> parse_scales(std::string_view json_text);
std::vector<LabelScale> load_scales(const std::filesystem::path& path);
// The four shipped scales: acceptability, grades, adjectives, percentiles.
const std::vector<LabelScale>& builtin_scales();
const LabelScale* find_scale(std::span<const LabelScale> scales, std::string_view name);

struct LabelSpan {
  std::string scale;
  std::string lower_label;
  std::string upper_label;
  std::vector<std::string> bands_touched;
  std::optional<double> lower_percentile;
  std::optional<double> upper_percentile;
  bool clamped = false;  // interval was clipped to [0, 100] for display
};

LabelSpan map_to_labels(const Interval& interval, const LabelScale& scale);

struct AnalysisOptions {
  double level = 0.95;
  std::optional<Method> method;  // nullopt: apply the decision rules
  BootstrapConfig bootstrap{10000, 0, false, 1};
  bayes::PriorSpec prior;
  bayes::GridResolution grid;
  std::size_t threads = 1;
};

struct MethodOutcome {
  Interval interval;
  bool recommended = false;
};

struct PosteriorSummary {
  double mean = 0.0;
  double mode = 0.0;
  std::vector<double> mu_axis;
  std::vector<double> mu_marginal;
};

struct AnalysisResult {
  Study study;
  MethodPlan plan;
  std::vector<MethodOutcome> intervals;
  Interval selected;
  bool method_was_explicit = false;
  std::vector<LabelSpan> labels;  // one per scale, for the selected interval
  std::vector<Warning> warnings;
  std::optional<PosteriorSummary> posterior;
  std::uint64_t seed = 0;

  const MethodOutcome* find(Method m) const;
};

// Rule 3: drop t if it violates [0, 100]; keep the narrower survivor;
// widths within 1e-9 favour t.
const Interval& rule3_select(const Interval& t, const Interval& expanded_bca);

AnalysisResult select_interval(const Study& study, const AnalysisOptions& options,
                               std::span<const LabelScale> scales = builtin_scales());

}  // namespace susci
