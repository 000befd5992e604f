#include "susci/decision.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "susci/embedded_data.hpp"
#include "susci/errors.hpp"

namespace susci {

std::string_view rule_tag(Rule rule) {
  switch (rule) {
    case Rule::Rule1_nLE5: return "Rule1_nLE5";
    case Rule::Rule2_n6to8: return "Rule2_n6to8";
    case Rule::Rule3_nGE9: return "Rule3_nGE9";
  }
  return "unknown";
}

bool MethodPlan::recommends(Method m) const {
  return std::find(recommended.begin(), recommended.end(), m) != recommended.end();
}

MethodPlan recommend(std::size_t n) {
  if (n == 0) throw DomainError("cannot recommend a method for an empty study");
  MethodPlan plan;
  if (n <= 5) {
    plan.rule_fired = Rule::Rule1_nLE5;
    plan.recommended = {Method::Bayes};
    plan.rationale =
        "5 or fewer respondents: t and expanded BCa intervals both fall short; the empirical "
        "Bayes credible interval borrows strength from historical SUS means";
    plan.caveat = std::string(kBayesCaveat);
  } else if (n <= 8) {
    plan.rule_fired = Rule::Rule2_n6to8;
    plan.recommended = {Method::ExpandedBCa};
    plan.rationale =
        "6 to 8 respondents: expanded BCa keeps comparable coverage, is narrower or similar in "
        "width, and abides the [0, 100] parameter space";
  } else {
    plan.rule_fired = Rule::Rule3_nGE9;
    plan.recommended = {Method::T, Method::ExpandedBCa};
    plan.rationale =
        "9 or more respondents: compute t and expanded BCa and report the narrower interval that "
        "abides the [0, 100] parameter space";
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Scales

namespace {

void validate_scale(const LabelScale& s) {
  if (s.name.empty()) throw ConfigError("scale without a name");
  if (s.bands.empty() == s.anchors.empty()) {
    throw ConfigError(fmt::format("scale '{}' must define exactly one of bands or anchors", s.name));
  }
  if (!s.bands.empty()) {
    if (s.bands.front().lower != kScoreMin || s.bands.back().upper != kScoreMax) {
      throw ConfigError(fmt::format("scale '{}' bands must span [0, 100]", s.name));
    }
    for (std::size_t k = 0; k < s.bands.size(); ++k) {
      const Band& b = s.bands[k];
      if (!(b.lower < b.upper)) {
        throw ConfigError(fmt::format("scale '{}' band '{}' is empty or reversed", s.name, b.label));
      }
      if (k > 0 && s.bands[k - 1].upper != b.lower) {
        throw ConfigError(fmt::format("scale '{}' has a gap or overlap between '{}' and '{}'",
                                      s.name, s.bands[k - 1].label, b.label));
      }
    }
  } else {
    if (s.anchors.front().score != kScoreMin || s.anchors.back().score != kScoreMax) {
      throw ConfigError(fmt::format("scale '{}' anchors must span scores 0..100", s.name));
    }
    for (std::size_t k = 1; k < s.anchors.size(); ++k) {
      if (!(s.anchors[k].score > s.anchors[k - 1].score) ||
          s.anchors[k].percentile < s.anchors[k - 1].percentile) {
        throw ConfigError(fmt::format("scale '{}' anchors are not monotone", s.name));
      }
    }
  }
}

double interpolate_percentile(const std::vector<PercentileAnchor>& anchors, double score) {
  score = std::clamp(score, kScoreMin, kScoreMax);
  auto it = std::lower_bound(anchors.begin(), anchors.end(), score,
                             [](const PercentileAnchor& a, double s) { return a.score < s; });
  if (it == anchors.begin()) return it->percentile;
  if (it == anchors.end()) return anchors.back().percentile;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double frac = (score - lo.score) / (hi.score - lo.score);
  return lo.percentile + frac * (hi.percentile - lo.percentile);
}

}  // namespace

std::vector<LabelScale> parse_scales(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("scale file is not valid JSON: {}", e.what()));
  }
  if (!doc.is_array()) throw ConfigError("scale file must be a JSON array");
  std::vector<LabelScale> out;
  try {
    for (const auto& entry : doc) {
      LabelScale s;
      s.name = entry.at("name").get<std::string>();
      s.provenance = entry.value("provenance", std::string{});
      if (entry.contains("bands")) {
        for (const auto& b : entry.at("bands")) {
          s.bands.push_back({b.at("label").get<std::string>(), b.at("lower").get<double>(),
                             b.at("upper").get<double>()});
        }
      }
      if (entry.contains("anchors")) {
        for (const auto& a : entry.at("anchors")) {
          s.anchors.push_back({a.at("score").get<double>(), a.at("percentile").get<double>()});
        }
      }
      validate_scale(s);
      out.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("malformed scale entry: {}", e.what()));
  }
  return out;
}

std::vector<LabelScale> load_scales(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open scale file {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scales(ss.str());
}

const std::vector<LabelScale>& builtin_scales() {
  static const std::vector<LabelScale> kScales = parse_scales(embedded::scales_json());
  return kScales;
}

const LabelScale* find_scale(std::span<const LabelScale> scales, std::string_view name) {
  for (const auto& s : scales) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

LabelSpan map_to_labels(const Interval& interval, const LabelScale& scale) {
  LabelSpan span;
  span.scale = scale.name;
  double lo = interval.lower;
  double hi = interval.upper;
  if (lo < kScoreMin || hi > kScoreMax) {
    span.clamped = true;
    lo = std::clamp(lo, kScoreMin, kScoreMax);
    hi = std::clamp(hi, kScoreMin, kScoreMax);
  }
  if (scale.is_percentile()) {
    span.lower_percentile = interpolate_percentile(scale.anchors, lo);
    span.upper_percentile = interpolate_percentile(scale.anchors, hi);
    span.lower_label = fmt::format("{:.1f}th percentile", *span.lower_percentile);
    span.upper_label = fmt::format("{:.1f}th percentile", *span.upper_percentile);
    return span;
  }
  // Bands are half-open [lower, upper) except the last, which includes 100.
  for (std::size_t k = 0; k < scale.bands.size(); ++k) {
    const Band& b = scale.bands[k];
    const bool last = k + 1 == scale.bands.size();
    const bool touches = b.lower <= hi && (last ? true : b.upper > lo);
    if (touches) span.bands_touched.push_back(b.label);
  }
  if (!span.bands_touched.empty()) {
    span.lower_label = span.bands_touched.front();
    span.upper_label = span.bands_touched.back();
  }
  return span;
}

// ---------------------------------------------------------------------------
// Selection

const MethodOutcome* AnalysisResult::find(Method m) const {
  for (const auto& o : intervals) {
    if (o.interval.method == m) return &o;
  }
  return nullptr;
}

const Interval& rule3_select(const Interval& t, const Interval& expanded_bca) {
  const bool t_abides = !t.diagnostics.violates_lower && !t.diagnostics.violates_upper;
  const bool b_abides =
      !expanded_bca.diagnostics.violates_lower && !expanded_bca.diagnostics.violates_upper;
  if (!t_abides && b_abides) return expanded_bca;
  if (t_abides && !b_abides) return t;
  return expanded_bca.diagnostics.width < t.diagnostics.width - 1e-9 ? expanded_bca : t;
}

AnalysisResult select_interval(const Study& study, const AnalysisOptions& options,
                               std::span<const LabelScale> scales) {
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw ValidationError(fmt::format("level {} outside (0, 1)", options.level),
                          {0, 0, "level", "level must lie strictly between 0 and 1"});
  }
  const std::size_t n = study.summary.n;
  AnalysisResult result;
  result.study = study;
  result.plan = recommend(n);
  result.seed = options.bootstrap.seed;
  const double level = options.level;

  auto add = [&](Interval iv) {
    const bool rec = result.plan.recommends(iv.method);
    result.intervals.push_back({std::move(iv), rec});
  };

  if (n >= 2) {
    add(z_interval(study, level));
    add(t_interval(study, level));
    add(truncation_adjusted_t_interval(study, level));
    BootstrapConfig cfg = options.bootstrap;
    cfg.threads = std::max(cfg.threads, options.threads);
    const BootstrapDistribution dist = bootstrap_means(study.scores, cfg);
    add(percentile_from_distribution(dist, level, 0.5 * (1.0 - level)));
    if (n >= 3) {
      add(bca_from_distribution(dist, study.scores, level, false));
      add(bca_from_distribution(dist, study.scores, level, true));
    } else {
      result.warnings.push_back({"method-unavailable", "BCa intervals need at least 3 scores"});
    }
  } else {
    result.warnings.push_back(
        {"method-unavailable", "only the Bayes credible interval is defined for a single score"});
  }

  const bool in_range = study.summary.min >= kScoreMin && study.summary.max <= kScoreMax;
  if (in_range) {
    const bayes::PosteriorGrid grid =
        bayes::posterior_grid(study.scores, options.prior, options.grid, options.threads);
    Interval credible = bayes::credible_interval(grid, level);
    credible.warnings.push_back(
        {"credible-interval", "credible interval: a direct probability statement about the mean, "
                              "not a confidence interval"});
    PosteriorSummary post;
    post.mean = bayes::posterior_mean(grid);
    post.mode = bayes::posterior_mode(grid);
    post.mu_axis = grid.mu_axis();
    post.mu_marginal = grid.mu_marginal();
    result.posterior = std::move(post);
    add(std::move(credible));
  } else {
    // Unclamped nine-item scores can reach 100.08, outside the model's support.
    result.warnings.push_back(
        {"method-unavailable",
         "the Bayes model needs every score in [0, 100]; clamp nine-item scores to use it"});
  }

  if (options.method) {
    const MethodOutcome* chosen = result.find(*options.method);
    if (!chosen) {
      throw DomainError(fmt::format("method {} is not defined for n = {}",
                                    method_tag(*options.method), n));
    }
    result.selected = chosen->interval;
    result.method_was_explicit = true;
    if (!chosen->recommended) {
      result.warnings.push_back(
          {"not-recommended",
           fmt::format("{} is not recommended for n = {} ({}); recommended: {}",
                       method_tag(*options.method), n, rule_tag(result.plan.rule_fired),
                       method_tag(result.plan.recommended.front()))});
    }
  } else {
    switch (result.plan.rule_fired) {
      case Rule::Rule1_nLE5:
        if (!result.find(Method::Bayes)) {
          throw ValidationError(
              "Rule 1 needs the Bayes interval, which requires scores within [0, 100]",
              {0, 0, "scores", "scores above 100 present; enable clamping of nine-item scores"});
        }
        result.selected = result.find(Method::Bayes)->interval;
        break;
      case Rule::Rule2_n6to8:
        result.selected = result.find(Method::ExpandedBCa)->interval;
        break;
      case Rule::Rule3_nGE9:
        result.selected = rule3_select(result.find(Method::T)->interval,
                                       result.find(Method::ExpandedBCa)->interval);
        break;
    }
  }
  if (result.selected.method == Method::Bayes) {
    result.warnings.push_back({"bayes-caveat", std::string(kBayesCaveat)});
  }
  if (result.selected.diagnostics.violates_lower || result.selected.diagnostics.violates_upper) {
    const bool any_abides = std::any_of(
        result.intervals.begin(), result.intervals.end(), [](const MethodOutcome& o) {
          return !o.interval.diagnostics.violates_lower && !o.interval.diagnostics.violates_upper;
        });
    result.warnings.push_back(
        {"bound-violation",
         any_abides ? "selected interval extends outside [0, 100]"
                    : "every candidate interval extends outside [0, 100]"});
  }
  for (const auto& scale : scales) result.labels.push_back(map_to_labels(result.selected, scale));
  return result;
}

}  // namespace susci
