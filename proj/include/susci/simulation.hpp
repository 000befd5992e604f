#pragma once

// Monte Carlo experiments over skew-normal SUS populations: sample-mean
// skewness, coverage/width/violation grids, Rule-3 validation and the
// upper-bound error analysis.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "susci/intervals.hpp"
#include "susci/rng.hpp"
#include "susci/stat_kernel.hpp"

#include <json.hpp>

namespace susci::sim {

// 13 evenly spaced points from -0.99 to 0.99.
std::vector<double> default_skew_grid();

enum class CoverageTarget {
  Effective,  // mean of the generating distribution after truncation/rounding
  Config,     // cfg.mean as given
};

struct SimConfig {
  double mean = 68.0;
  double sd = 20.0;
  std::vector<double> skew_grid = default_skew_grid();
  std::vector<double> extra_skews{-0.39};  // explicit check cells appended to the grid
  std::vector<std::size_t> n_grid{4, 5, 6, 7, 8, 9, 10};
  std::size_t reps = 500;
  double level = 0.95;
  bool truncate_at_100 = true;
  bool round_to_grid = true;
  std::uint64_t seed = 20240601;
  std::size_t bootstrap_resamples = 2000;
  CoverageTarget coverage_target = CoverageTarget::Effective;
  std::size_t threads = 1;

  // Throws ConfigError on reps == 0, unattainable skews, sd <= 0, bad level.
  void validate() const;
  std::vector<double> all_skews() const;
};

SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& cfg);

// Generating distribution for one skew value. Throws ConfigError when the
// share of draws that survive truncation at 100 is below 1%.
class Population {
 public:
  Population(const SimConfig& cfg, double skew);

  const stat::SkewNormalParams& params() const noexcept { return params_; }
  double acceptance() const noexcept { return acceptance_; }
  // Mean of the distribution generate() actually samples from.
  double effective_mean() const noexcept { return effective_mean_; }

  std::vector<double> generate(std::size_t n, Rng& rng) const;

 private:
  stat::SkewNormalParams params_;
  bool truncate_;
  bool round_;
  double acceptance_ = 1.0;
  double effective_mean_ = 0.0;
};

std::vector<double> generate_study(const SimConfig& cfg, std::size_t n, double skew, Rng& rng);

struct Histogram {
  double lower = 0.0;
  double bin_width = 0.0;
  std::vector<double> density;
};

struct SampleMeanResult {
  double skewness_of_means = 0.0;
  double parent_mean = 0.0;     // pooled draws, after truncation and rounding
  double parent_sd = 0.0;
  double parent_skewness = 0.0;
  double mean_of_means = 0.0;
  Histogram histogram;
};

// `skew` picks the parent; reps studies of size n are drawn.
SampleMeanResult sample_mean_distribution(const SimConfig& cfg, std::size_t n, double skew,
                                          std::size_t bins = 60);

struct MethodStats {
  Method method = Method::T;
  double coverage = 0.0;
  double coverage_se = 0.0;
  double mean_width = 0.0;
  double violation_rate = 0.0;
  double violation_se = 0.0;
  double upper_at_least_70 = 0.0;  // share of upper bounds >= 70
};

struct CellResult {
  std::size_t n = 0;
  double skew = 0.0;
  double true_mean = 0.0;
  std::size_t reps = 0;
  MethodStats t;
  MethodStats expanded_bca;
  MethodStats rule3;  // coverage of the Rule-3 selection; meaningful for n >= 9
  double width_ratio_bca_over_t = 0.0;
};

struct ExperimentResult {
  std::string experiment;
  SimConfig config;
  std::vector<CellResult> cells;
  std::vector<std::string> notes;
};

// Runs every (n, skew) cell; reps replications each with independent substreams.
ExperimentResult run_coverage_experiment(const SimConfig& cfg);

struct Rule3Summary {
  ExperimentResult grid;
  double min_coverage = 0.0;
  double max_coverage = 0.0;
  double mean_coverage = 0.0;
};

// Requires every n >= 9.
Rule3Summary run_rule3_validation(const SimConfig& cfg);

struct UpperBoundSummary {
  ExperimentResult grid;
  double t_contains_70 = 0.0;
  double bca_contains_70 = 0.0;
  double bca_fewer_errors_fraction = 0.0;
};

UpperBoundSummary run_upper_bound_experiment(const SimConfig& cfg);

// Defaults for the upper-bound analysis: mean 50, sd 20, n 4..10.
SimConfig upper_bound_defaults();

// Synthetic multi-study batch (varied n, mean and skew) for end-to-end
// exercise of the analysis and report pipeline.
struct SyntheticStudy {
  std::vector<double> scores;
  double true_mean = 0.0;
};
std::vector<SyntheticStudy> synthetic_study_batch(std::uint64_t seed, std::size_t count = 206);

// One CSV row per cell per method.
void write_cells_csv(std::ostream& out, const ExperimentResult& result);
nlohmann::json to_json(const ExperimentResult& result);
nlohmann::json to_json(const SampleMeanResult& result);
nlohmann::json to_json(const Rule3Summary& result);
nlohmann::json to_json(const UpperBoundSummary& result);

}  // namespace susci::sim
