#pragma once

// Frequentist interval constructors for a mean SUS score: z, t,
// truncation-adjusted t, percentile bootstrap, BCa and expanded BCa.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "susci/sus_core.hpp"

namespace susci {

enum class Method { Z, T, TruncAdjustedT, Percentile, BCa, ExpandedBCa, Bayes };

// CLI/JSON tags: "z", "t", "adjusted-t", "percentile", "bca", "expanded-bca", "bayes".
std::string_view method_tag(Method method);
std::optional<Method> parse_method(std::string_view tag);
const std::vector<Method>& all_methods();

struct ParameterBounds {
  double lower = kScoreMin;
  double upper = kScoreMax;
};

struct Diagnostics {
  bool violates_lower = false;
  bool violates_upper = false;
  double width = 0.0;
  bool degenerate = false;
};

struct Warning {
  std::string code;
  std::string message;
};

// Internals of a BCa-family interval, kept for reporting and tests.
struct BcaDetails {
  double bias_proportion = 0.0;  // share of resample means strictly below the sample mean
  double bias = 0.0;             // b = Phi^{-1}(bias_proportion)
  double acceleration = 0.0;     // a
  double tail_probability = 0.0; // alpha/2, or alpha'/2 when expanded
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  std::size_t lower_rank = 0;  // 1-based order statistics
  std::size_t upper_rank = 0;
  bool percentile_fallback = false;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  Method method = Method::T;
  Diagnostics diagnostics;
  std::vector<Warning> warnings;
  std::optional<BcaDetails> bca;
};

Diagnostics interval_diagnostics(double lower, double upper, ParameterBounds bounds = {});

struct BootstrapConfig {
  std::size_t resamples = 10000;
  std::uint64_t seed = 0;
  bool expansion = false;  // percentile_bootstrap only; BCa callers pick explicitly
  std::size_t threads = 1;
};

// Resamples drawn in fixed blocks, each from its own substream of cfg.seed,
// so the distribution is identical for any thread count.
inline constexpr std::size_t kResampleBlock = 2048;

struct BootstrapDistribution {
  std::vector<double> sorted_means;
  double sample_mean = 0.0;
  std::size_t n = 0;
};

BootstrapDistribution bootstrap_means(std::span<const double> scores, const BootstrapConfig& cfg);
// Order statistic at rank ceil(prob * B), clamped to [1, B].
std::size_t order_statistic_rank(double prob, std::size_t resamples);

Interval z_interval(const Study& study, double level);
Interval t_interval(const Study& study, double level);
Interval truncation_adjusted_t_interval(const Study& study, double level,
                                        ParameterBounds bounds = {});

Interval percentile_bootstrap(std::span<const double> scores, double level,
                              const BootstrapConfig& cfg);
// Percentile bounds at tail and 1 - tail of an existing distribution.
Interval percentile_from_distribution(const BootstrapDistribution& dist, double level,
                                      double tail);

struct AdjustedTails {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

// Efron's BCa percentile adjustment. Throws DomainError when
// 1 - a(b + z) <= 1e-9 at either tail.
AdjustedTails bca_alpha_adjust(double bias, double acceleration, double alpha_half);
// Leave-one-out jackknife estimate of a for the mean.
double jackknife_acceleration(std::span<const double> scores);
// alpha'/2 = Phi(-sqrt(n / (n - 1)) t_{1 - alpha/2, n - 1}).
double expansion_quantile(double level, std::size_t n);

struct BcaFactors {
  double bias = 0.0;
  double acceleration = 0.0;
};

// BCa bounds from an existing distribution. `forced` overrides the
// estimated factors (used to check the percentile reduction).
Interval bca_from_distribution(const BootstrapDistribution& dist, std::span<const double> scores,
                               double level, bool expanded,
                               std::optional<BcaFactors> forced = std::nullopt);
Interval bca_interval(std::span<const double> scores, double level, const BootstrapConfig& cfg);
Interval expanded_bca_interval(std::span<const double> scores, double level,
                               const BootstrapConfig& cfg);

}  // namespace susci
