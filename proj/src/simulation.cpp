#include "susci/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "susci/decision.hpp"
#include "susci/errors.hpp"
#include "susci/parallel.hpp"
#include "susci/sus_core.hpp"

namespace susci::sim {

namespace {

constexpr std::uint64_t kGridStreamTag = 0x6c1d;
constexpr std::uint64_t kMeansStreamTag = 0x3ea5;
constexpr std::uint64_t kBatchStreamTag = 0xba7c;
constexpr std::size_t kMaxRejections = 100000;
constexpr double kGridStep = 2.5;

double round_to_sus_grid(double x) {
  return std::clamp(std::round(x / kGridStep) * kGridStep, kScoreMin, kScoreMax);
}

struct Moments {
  double mass = 0.0;
  double first = 0.0;
};

// Composite Simpson on [a, b] of f and x f.
Moments integrate(const stat::SkewNormalParams& p, double a, double b, int intervals = 128) {
  Moments m;
  if (!(b > a)) return m;
  const double h = (b - a) / intervals;
  for (int k = 0; k <= intervals; ++k) {
    const double x = a + h * k;
    const double w = (k == 0 || k == intervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    const double f = stat::skew_normal_pdf(x, p);
    m.mass += w * f;
    m.first += w * x * f;
  }
  m.mass *= h / 3.0;
  m.first *= h / 3.0;
  return m;
}

double proportion_se(double p, std::size_t reps) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

std::vector<double> default_skew_grid() {
  std::vector<double> grid(13);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid[k] = -0.99 + 0.165 * static_cast<double>(k);
  }
  grid[6] = 0.0;
  grid[12] = 0.99;
  return grid;
}

void SimConfig::validate() const {
  require(reps >= 1, "reps must be at least 1");
  require(sd > 0.0 && std::isfinite(sd), fmt::format("sd must be positive, got {}", sd));
  require(std::isfinite(mean), "mean must be finite");
  require(level > 0.0 && level < 1.0, fmt::format("level {} outside (0, 1)", level));
  require(bootstrap_resamples >= 1, "bootstrap_resamples must be at least 1");
  require(!n_grid.empty(), "n_grid is empty");
  for (std::size_t n : n_grid) {
    require(n >= 3, fmt::format("n = {} too small; expanded BCa needs n >= 3", n));
  }
  require(!all_skews().empty(), "skew grid is empty");
  for (double s : all_skews()) {
    require(std::abs(s) < stat::kSkewNormalMaxSkewness,
            fmt::format("skewness {} is not attainable by a skew-normal", s));
  }
}

std::vector<double> SimConfig::all_skews() const {
  std::vector<double> out = skew_grid;
  for (double s : extra_skews) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> kKnown = {
      "mean", "sd", "skew_grid", "extra_skews", "n_grid", "reps", "level", "truncate_at_100",
      "round_to_grid", "seed", "bootstrap_resamples", "coverage_target", "threads",
      // experiment selectors, read by the caller
      "experiment", "n", "skew", "bins"};
  if (!j.is_object()) throw ConfigError("simulation config must be a JSON object");
  for (const auto& item : j.items()) {
    if (!kKnown.count(item.key())) {
      throw ConfigError(fmt::format("unknown simulation config key '{}'", item.key()));
    }
  }
  SimConfig cfg;
  try {
    cfg.mean = j.value("mean", cfg.mean);
    cfg.sd = j.value("sd", cfg.sd);
    if (j.contains("skew_grid")) cfg.skew_grid = j.at("skew_grid").get<std::vector<double>>();
    if (j.contains("extra_skews")) {
      cfg.extra_skews = j.at("extra_skews").get<std::vector<double>>();
    }
    if (j.contains("n_grid")) cfg.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    cfg.reps = j.value("reps", cfg.reps);
    cfg.level = j.value("level", cfg.level);
    cfg.truncate_at_100 = j.value("truncate_at_100", cfg.truncate_at_100);
    cfg.round_to_grid = j.value("round_to_grid", cfg.round_to_grid);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.bootstrap_resamples = j.value("bootstrap_resamples", cfg.bootstrap_resamples);
    cfg.threads = j.value("threads", cfg.threads);
    if (j.contains("coverage_target")) {
      const auto target = j.at("coverage_target").get<std::string>();
      if (target == "effective") {
        cfg.coverage_target = CoverageTarget::Effective;
      } else if (target == "config") {
        cfg.coverage_target = CoverageTarget::Config;
      } else {
        throw ConfigError(fmt::format("coverage_target must be effective or config, got '{}'",
                                      target));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("malformed simulation config: {}", e.what()));
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const SimConfig& cfg) {
  return {{"mean", cfg.mean},
          {"sd", cfg.sd},
          {"skew_grid", cfg.skew_grid},
          {"extra_skews", cfg.extra_skews},
          {"n_grid", cfg.n_grid},
          {"reps", cfg.reps},
          {"level", cfg.level},
          {"truncate_at_100", cfg.truncate_at_100},
          {"round_to_grid", cfg.round_to_grid},
          {"seed", cfg.seed},
          {"bootstrap_resamples", cfg.bootstrap_resamples},
          {"coverage_target",
           cfg.coverage_target == CoverageTarget::Effective ? "effective" : "config"}};
}

// ---------------------------------------------------------------------------

Population::Population(const SimConfig& cfg, double skew)
    : params_(stat::skew_normal_from_moments(cfg.mean, cfg.sd, skew)),
      truncate_(cfg.truncate_at_100),
      round_(cfg.round_to_grid) {
  // The density is bounded by 2 phi(z) / omega, so +-12 omega holds all mass.
  const double lo = params_.location - 12.0 * params_.scale;
  const double hi = params_.location + 12.0 * params_.scale;
  const double top = truncate_ ? std::min(hi, kScoreMax) : hi;

  std::vector<double> cuts{lo};
  if (round_) {
    for (int k = 0; k < 40; ++k) {
      const double edge = kGridStep * k + 0.5 * kGridStep;
      if (edge > lo && edge < top) cuts.push_back(edge);
    }
  }
  if (truncate_ && kScoreMax > lo && kScoreMax < hi) cuts.push_back(kScoreMax);
  cuts.push_back(hi);

  double total = 0.0;
  double kept = 0.0;
  double first = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const Moments m = integrate(params_, cuts[k], cuts[k + 1]);
    total += m.mass;
    if (cuts[k] >= top) continue;
    kept += m.mass;
    first += round_ ? m.mass * round_to_sus_grid(0.5 * (cuts[k] + cuts[k + 1])) : m.first;
  }
  acceptance_ = kept / total;
  if (truncate_ && acceptance_ < 0.01) {
    throw ConfigError(fmt::format(
        "truncation at 100 keeps only {:.3g}% of draws for mean {}, sd {}, skew {}",
        100.0 * acceptance_, cfg.mean, cfg.sd, skew));
  }
  effective_mean_ = (truncate_ || round_) ? first / kept : cfg.mean;
}

std::vector<double> Population::generate(std::size_t n, Rng& rng) const {
  std::vector<double> out(n);
  for (auto& x : out) {
    x = stat::skew_normal_draw(params_, rng);
    if (truncate_) {
      std::size_t tries = 0;
      while (x > kScoreMax) {
        if (++tries > kMaxRejections) {
          throw ConfigError("rejection sampling above 100 did not terminate");
        }
        x = stat::skew_normal_draw(params_, rng);
      }
    }
    if (round_) x = round_to_sus_grid(x);
  }
  return out;
}

std::vector<double> generate_study(const SimConfig& cfg, std::size_t n, double skew, Rng& rng) {
  return Population(cfg, skew).generate(n, rng);
}

// ---------------------------------------------------------------------------

SampleMeanResult sample_mean_distribution(const SimConfig& cfg, std::size_t n, double skew,
                                          std::size_t bins) {
  require(cfg.reps >= 3, "sample-mean distribution needs at least 3 reps");
  require(n >= 1, "study size must be at least 1");
  require(bins >= 1, "histogram needs at least one bin");
  const Population pop(cfg, skew);
  std::vector<double> pooled(cfg.reps * n);
  std::vector<double> means(cfg.reps);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t rep) {
    Rng rng = Rng::substream(cfg.seed, {kMeansStreamTag, n, rep});
    const auto xs = pop.generate(n, rng);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      pooled[rep * n + j] = xs[j];
      sum += xs[j];
    }
    means[rep] = sum / static_cast<double>(n);
  });

  SampleMeanResult r;
  const Study parent = study_summary(std::span<const double>(pooled));
  r.parent_mean = parent.summary.mean;
  r.parent_sd = parent.summary.sd.value_or(0.0);
  r.parent_skewness = parent.summary.skewness.value_or(0.0);
  const Study of_means = study_summary(std::span<const double>(means));
  r.mean_of_means = of_means.summary.mean;
  r.skewness_of_means = of_means.summary.skewness.value_or(0.0);

  const double lo = of_means.summary.min;
  const double hi = of_means.summary.max;
  r.histogram.lower = lo;
  r.histogram.bin_width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
  r.histogram.density.assign(bins, 0.0);
  for (double m : means) {
    auto k = static_cast<std::size_t>((m - lo) / r.histogram.bin_width);
    r.histogram.density[std::min(k, bins - 1)] += 1.0;
  }
  for (auto& d : r.histogram.density) {
    d /= static_cast<double>(cfg.reps) * r.histogram.bin_width;
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct RepOutcome {
  double t_lower, t_upper, e_lower, e_upper;
  bool rule3_picked_t;
};

struct Tally {
  std::size_t covered = 0;
  std::size_t violated = 0;
  std::size_t upper70 = 0;
  double width = 0.0;

  void add(double lower, double upper, double target) {
    covered += lower <= target && target <= upper;
    violated += lower < kScoreMin || upper > kScoreMax;
    upper70 += upper >= 70.0;
    width += upper - lower;
  }

  MethodStats finish(Method method, std::size_t reps) const {
    const auto r = static_cast<double>(reps);
    MethodStats s;
    s.method = method;
    s.coverage = static_cast<double>(covered) / r;
    s.coverage_se = proportion_se(s.coverage, reps);
    s.violation_rate = static_cast<double>(violated) / r;
    s.violation_se = proportion_se(s.violation_rate, reps);
    s.upper_at_least_70 = static_cast<double>(upper70) / r;
    s.mean_width = width / r;
    return s;
  }
};

ExperimentResult run_grid(const SimConfig& cfg, std::string name) {
  cfg.validate();
  const std::vector<double> skews = cfg.all_skews();
  std::vector<Population> pops;
  pops.reserve(skews.size());
  for (double s : skews) pops.emplace_back(cfg, s);

  const std::size_t cells = cfg.n_grid.size() * skews.size();
  std::vector<RepOutcome> outcomes(cells * cfg.reps);
  parallel_for(cells * cfg.reps, cfg.threads, [&](std::size_t task) {
    const std::size_t cell = task / cfg.reps;
    const std::size_t rep = task % cfg.reps;
    const std::size_t n = cfg.n_grid[cell / skews.size()];
    const std::size_t si = cell % skews.size();
    Rng rng = Rng::substream(cfg.seed, {kGridStreamTag, n, si, rep});
    const std::vector<double> scores = pops[si].generate(n, rng);
    const Study study = study_summary(std::span<const double>(scores));
    const Interval t = t_interval(study, cfg.level);
    const BootstrapConfig boot{cfg.bootstrap_resamples, rng.next_u64(), false, 1};
    const Interval e =
        bca_from_distribution(bootstrap_means(scores, boot), scores, cfg.level, true);
    outcomes[task] = {t.lower, t.upper, e.lower, e.upper, &rule3_select(t, e) == &t};
  });

  ExperimentResult result;
  result.experiment = std::move(name);
  result.config = cfg;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const std::size_t si = cell % skews.size();
    CellResult c;
    c.n = cfg.n_grid[cell / skews.size()];
    c.skew = skews[si];
    c.reps = cfg.reps;
    c.true_mean =
        cfg.coverage_target == CoverageTarget::Effective ? pops[si].effective_mean() : cfg.mean;
    Tally t, e, sel;
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      const RepOutcome& o = outcomes[cell * cfg.reps + rep];
      t.add(o.t_lower, o.t_upper, c.true_mean);
      e.add(o.e_lower, o.e_upper, c.true_mean);
      if (o.rule3_picked_t) {
        sel.add(o.t_lower, o.t_upper, c.true_mean);
      } else {
        sel.add(o.e_lower, o.e_upper, c.true_mean);
      }
    }
    c.t = t.finish(Method::T, cfg.reps);
    c.expanded_bca = e.finish(Method::ExpandedBCa, cfg.reps);
    c.rule3 = sel.finish(Method::T, cfg.reps);
    c.width_ratio_bca_over_t = c.expanded_bca.mean_width / c.t.mean_width;
    result.cells.push_back(c);
  }
  if (cfg.bootstrap_resamples < 10000) {
    result.notes.push_back(fmt::format(
        "bootstrap uses B = {} per replication (interactive default 10000); interval endpoints "
        "sit on coarser order statistics, so BCa rates carry extra Monte Carlo noise",
        cfg.bootstrap_resamples));
  }
  result.notes.push_back(
      cfg.coverage_target == CoverageTarget::Effective
          ? "coverage is measured against the mean of the generating distribution after "
            "truncation and rounding"
          : "coverage is measured against the configured mean");
  return result;
}

}  // namespace

ExperimentResult run_coverage_experiment(const SimConfig& cfg) {
  return run_grid(cfg, "coverage");
}

Rule3Summary run_rule3_validation(const SimConfig& cfg) {
  for (std::size_t n : cfg.n_grid) {
    require(n >= 9, fmt::format("Rule-3 validation needs n >= 9, got {}", n));
  }
  Rule3Summary s;
  s.grid = run_grid(cfg, "rule3");
  s.min_coverage = 1.0;
  s.max_coverage = 0.0;
  double sum = 0.0;
  for (const auto& c : s.grid.cells) {
    s.min_coverage = std::min(s.min_coverage, c.rule3.coverage);
    s.max_coverage = std::max(s.max_coverage, c.rule3.coverage);
    sum += c.rule3.coverage;
  }
  s.mean_coverage = sum / static_cast<double>(s.grid.cells.size());
  return s;
}

SimConfig upper_bound_defaults() {
  SimConfig cfg;
  cfg.mean = 50.0;
  cfg.extra_skews.clear();
  return cfg;
}

UpperBoundSummary run_upper_bound_experiment(const SimConfig& cfg) {
  UpperBoundSummary s;
  s.grid = run_grid(cfg, "upper-bound");
  std::size_t better = 0;
  double t_sum = 0.0;
  double e_sum = 0.0;
  for (const auto& c : s.grid.cells) {
    t_sum += c.t.upper_at_least_70;
    e_sum += c.expanded_bca.upper_at_least_70;
    better += c.expanded_bca.upper_at_least_70 < c.t.upper_at_least_70;
  }
  const auto cells = static_cast<double>(s.grid.cells.size());
  s.t_contains_70 = t_sum / cells;
  s.bca_contains_70 = e_sum / cells;
  s.bca_fewer_errors_fraction = static_cast<double>(better) / cells;
  return s;
}

std::vector<SyntheticStudy> synthetic_study_batch(std::uint64_t seed, std::size_t count) {
  std::vector<SyntheticStudy> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng = Rng::substream(seed, {kBatchStreamTag, k});
    SimConfig cfg;
    cfg.mean = 45.0 + 45.0 * rng.uniform();
    cfg.sd = 8.0 + 14.0 * rng.uniform();
    const double skew = -0.9 + 1.2 * rng.uniform();
    const std::size_t n = 3 + rng.index(28);
    const Population pop(cfg, skew);
    out.push_back({pop.generate(n, rng), pop.effective_mean()});
  }
  return out;
}

// ---------------------------------------------------------------------------

void write_cells_csv(std::ostream& out, const ExperimentResult& result) {
  out << "experiment,n,skew,true_mean,reps,method,coverage,coverage_se,mean_width,"
         "violation_rate,violation_se,upper_ge_70,width_ratio_bca_over_t\n";
  for (const auto& c : result.cells) {
    auto row = [&](std::string_view tag, const MethodStats& m) {
      out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", result.experiment, c.n,
                         c.skew, c.true_mean, c.reps, tag, m.coverage, m.coverage_se,
                         m.mean_width, m.violation_rate, m.violation_se, m.upper_at_least_70,
                         c.width_ratio_bca_over_t);
    };
    row(method_tag(Method::T), c.t);
    row(method_tag(Method::ExpandedBCa), c.expanded_bca);
    if (c.n >= 9) row("rule3", c.rule3);
  }
}

namespace {

nlohmann::json method_json(const MethodStats& m) {
  return {{"coverage", m.coverage},
          {"coverage_se", m.coverage_se},
          {"mean_width", m.mean_width},
          {"violation_rate", m.violation_rate},
          {"violation_se", m.violation_se},
          {"upper_ge_70", m.upper_at_least_70}};
}

}  // namespace

nlohmann::json to_json(const ExperimentResult& result) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : result.cells) {
    nlohmann::json cell = {{"n", c.n},
                           {"skew", c.skew},
                           {"true_mean", c.true_mean},
                           {"reps", c.reps},
                           {"t", method_json(c.t)},
                           {"expanded_bca", method_json(c.expanded_bca)},
                           {"width_ratio_bca_over_t", c.width_ratio_bca_over_t}};
    if (c.n >= 9) cell["rule3"] = method_json(c.rule3);
    cells.push_back(std::move(cell));
  }
  return {{"experiment", result.experiment},
          {"config", to_json(result.config)},
          {"cells", std::move(cells)},
          {"notes", result.notes}};
}

nlohmann::json to_json(const SampleMeanResult& r) {
  return {{"experiment", "sample-mean"},
          {"skewness_of_means", r.skewness_of_means},
          {"mean_of_means", r.mean_of_means},
          {"parent", {{"mean", r.parent_mean}, {"sd", r.parent_sd}, {"skewness", r.parent_skewness}}},
          {"histogram",
           {{"lower", r.histogram.lower},
            {"bin_width", r.histogram.bin_width},
            {"density", r.histogram.density}}}};
}

nlohmann::json to_json(const Rule3Summary& r) {
  nlohmann::json j = to_json(r.grid);
  j["summary"] = {{"min_coverage", r.min_coverage},
                  {"max_coverage", r.max_coverage},
                  {"mean_coverage", r.mean_coverage}};
  return j;
}

nlohmann::json to_json(const UpperBoundSummary& r) {
  nlohmann::json j = to_json(r.grid);
  j["summary"] = {{"t_contains_70", r.t_contains_70},
                  {"bca_contains_70", r.bca_contains_70},
                  {"bca_fewer_errors_fraction", r.bca_fewer_errors_fraction}};
  return j;
}

}  // namespace susci::sim
