#include "susci/intervals.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "susci/errors.hpp"
#include "susci/parallel.hpp"
#include "susci/rng.hpp"
#include "susci/simd/kernels.hpp"
#include "susci/stat_kernel.hpp"

namespace susci {
namespace {

constexpr std::uint64_t kBootstrapStreamTag = 0xb0075;
constexpr double kAccelerationGuard = 1e-9;

void require_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError(fmt::format("confidence level {} outside (0, 1)", level));
  }
}

void require_n(std::size_t n, std::size_t minimum, std::string_view what) {
  if (n < minimum) {
    throw DomainError(fmt::format("{} needs n >= {}, got {}", what, minimum, n));
  }
}

double sequential_mean(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

Interval make_interval(double lower, double upper, double level, Method method,
                       ParameterBounds bounds = {}) {
  Interval iv;
  iv.lower = lower;
  iv.upper = upper;
  iv.level = level;
  iv.method = method;
  iv.diagnostics = interval_diagnostics(lower, upper, bounds);
  return iv;
}

void warn_few_resamples(Interval& iv, std::size_t resamples) {
  if (resamples < 1000) {
    iv.warnings.push_back({"few-resamples",
                           fmt::format("B = {} resamples is below the recommended 1000",
                                       resamples)});
  }
}

double standard_error(const Study& study) {
  return *study.summary.sd / std::sqrt(static_cast<double>(study.summary.n));
}

}  // namespace

std::string_view method_tag(Method method) {
  switch (method) {
    case Method::Z: return "z";
    case Method::T: return "t";
    case Method::TruncAdjustedT: return "adjusted-t";
    case Method::Percentile: return "percentile";
    case Method::BCa: return "bca";
    case Method::ExpandedBCa: return "expanded-bca";
    case Method::Bayes: return "bayes";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view tag) {
  for (Method m : all_methods()) {
    if (method_tag(m) == tag) return m;
  }
  return std::nullopt;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> kAll{Method::Z,   Method::T,           Method::TruncAdjustedT,
                                        Method::Percentile, Method::BCa, Method::ExpandedBCa,
                                        Method::Bayes};
  return kAll;
}

Diagnostics interval_diagnostics(double lower, double upper, ParameterBounds bounds) {
  Diagnostics d;
  d.violates_lower = lower < bounds.lower;
  d.violates_upper = upper > bounds.upper;
  d.width = upper - lower;
  d.degenerate = lower == upper;
  return d;
}

std::size_t order_statistic_rank(double prob, std::size_t resamples) {
  const double b = static_cast<double>(resamples);
  // The slack absorbs representation error in prob * B (0.975 * 1e5 etc.).
  const double raw = std::ceil(prob * b - 1e-9);
  if (!(raw >= 1.0)) return 1;
  if (raw >= b) return resamples;
  return static_cast<std::size_t>(raw);
}

BootstrapDistribution bootstrap_means(std::span<const double> scores, const BootstrapConfig& cfg) {
  require_n(scores.size(), 1, "bootstrap");
  if (cfg.resamples < 1) throw DomainError("bootstrap needs at least one resample");
  const std::size_t n = scores.size();
  const auto n32 = static_cast<std::uint32_t>(n);
  BootstrapDistribution dist;
  dist.n = n;
  dist.sample_mean = sequential_mean(scores);
  dist.sorted_means.resize(cfg.resamples);

  const std::size_t blocks = (cfg.resamples + kResampleBlock - 1) / kResampleBlock;
  const auto& kernels = simd::active_kernels();
  parallel_for(blocks, cfg.threads, [&](std::size_t block) {
    const std::size_t first = block * kResampleBlock;
    const std::size_t count = std::min(kResampleBlock, cfg.resamples - first);
    Rng rng = Rng::substream(cfg.seed, {kBootstrapStreamTag, block});
    std::vector<std::uint32_t> indices(count * n);
    for (auto& idx : indices) idx = rng.index(n32);
    kernels.resample_means(scores.data(), indices.data(), n, count,
                           dist.sorted_means.data() + first);
  });
  std::sort(dist.sorted_means.begin(), dist.sorted_means.end());
  return dist;
}

Interval z_interval(const Study& study, double level) {
  require_level(level);
  require_n(study.summary.n, 2, "z interval");
  const double z = stat::normal_quantile(1.0 - 0.5 * (1.0 - level));
  const double half = z * standard_error(study);
  return make_interval(study.summary.mean - half, study.summary.mean + half, level, Method::Z);
}

Interval t_interval(const Study& study, double level) {
  require_level(level);
  require_n(study.summary.n, 2, "t interval");
  const int df = static_cast<int>(study.summary.n - 1);
  const double t = stat::t_quantile(1.0 - 0.5 * (1.0 - level), df);
  const double half = t * standard_error(study);
  return make_interval(study.summary.mean - half, study.summary.mean + half, level, Method::T);
}

Interval truncation_adjusted_t_interval(const Study& study, double level, ParameterBounds bounds) {
  Interval plain = t_interval(study, level);
  plain.method = Method::TruncAdjustedT;
  const bool low = plain.lower < bounds.lower;
  const bool high = plain.upper > bounds.upper;
  if (!low && !high) return plain;

  const double mean = study.summary.mean;
  const double se = standard_error(study);
  const int df = static_cast<int>(study.summary.n - 1);
  auto full_range = [&](std::string message) {
    Interval iv = make_interval(bounds.lower, bounds.upper, level, Method::TruncAdjustedT, bounds);
    iv.warnings.push_back({"unattainable-level", std::move(message)});
    return iv;
  };
  if (low && high) {
    return full_range("t interval violates both parameter bounds; reporting the full range");
  }
  if (high) {
    // Keep P(L < mu < upper bound) at the nominal level by moving L left.
    const double target = stat::t_cdf((bounds.upper - mean) / se, df) - level;
    if (!(target > 0.0)) {
      return full_range("nominal level unattainable inside the parameter bounds");
    }
    const double lower = mean + se * stat::t_quantile(target, df);
    if (lower < bounds.lower) {
      return full_range("shifted lower bound falls below the parameter space");
    }
    return make_interval(lower, bounds.upper, level, Method::TruncAdjustedT, bounds);
  }
  const double target = level + stat::t_cdf((bounds.lower - mean) / se, df);
  if (!(target < 1.0)) {
    return full_range("nominal level unattainable inside the parameter bounds");
  }
  const double upper = mean + se * stat::t_quantile(target, df);
  if (upper > bounds.upper) {
    return full_range("shifted upper bound exceeds the parameter space");
  }
  return make_interval(bounds.lower, upper, level, Method::TruncAdjustedT, bounds);
}

Interval percentile_from_distribution(const BootstrapDistribution& dist, double level,
                                      double tail) {
  const auto& m = dist.sorted_means;
  const std::size_t lo = order_statistic_rank(tail, m.size());
  const std::size_t hi = order_statistic_rank(1.0 - tail, m.size());
  Interval iv = make_interval(m[lo - 1], m[hi - 1], level, Method::Percentile);
  warn_few_resamples(iv, m.size());
  return iv;
}

Interval percentile_bootstrap(std::span<const double> scores, double level,
                              const BootstrapConfig& cfg) {
  require_level(level);
  require_n(scores.size(), 2, "percentile bootstrap");
  const BootstrapDistribution dist = bootstrap_means(scores, cfg);
  const double tail = cfg.expansion ? expansion_quantile(level, scores.size()) : 0.5 * (1.0 - level);
  return percentile_from_distribution(dist, level, tail);
}

AdjustedTails bca_alpha_adjust(double bias, double acceleration, double alpha_half) {
  if (!(alpha_half > 0.0 && alpha_half < 0.5)) {
    throw DomainError(fmt::format("tail probability {} outside (0, 0.5)", alpha_half));
  }
  const double z_lo = stat::normal_quantile(alpha_half);
  const double z_hi = -z_lo;
  auto adjust = [&](double z) {
    const double shifted = bias + z;
    const double denom = 1.0 - acceleration * shifted;
    if (denom <= kAccelerationGuard) {
      throw DomainError(fmt::format(
          "degenerate acceleration: 1 - a(b + z) = {} for a = {}, b = {}, z = {}", denom,
          acceleration, bias, z));
    }
    return stat::normal_cdf(bias + shifted / denom);
  };
  return {adjust(z_lo), adjust(z_hi)};
}

double jackknife_acceleration(std::span<const double> scores) {
  const std::size_t n = scores.size();
  require_n(n, 3, "jackknife acceleration");
  double total = 0.0;
  for (double x : scores) total += x;
  std::vector<double> loo(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) loo[i] = (total - scores[i]) / denom;
  const double loo_mean = sequential_mean(loo);
  double s2 = 0.0, s3 = 0.0, scale = 0.0;
  for (double v : loo) {
    const double d = loo_mean - v;
    s2 += d * d;
    s3 += d * d * d;
    scale = std::max(scale, std::abs(v));
  }
  const double floor = 1e-13 * std::max(scale, 1e-300);
  if (!(s2 > floor * floor)) {
    throw UndefinedStatistic("jackknife acceleration undefined: constant data");
  }
  return s3 / (6.0 * std::pow(s2, 1.5));
}

double expansion_quantile(double level, std::size_t n) {
  require_level(level);
  require_n(n, 2, "expansion quantile");
  const double nd = static_cast<double>(n);
  const double t = stat::t_quantile(1.0 - 0.5 * (1.0 - level), static_cast<int>(n - 1));
  return stat::normal_cdf(-std::sqrt(nd / (nd - 1.0)) * t);
}

Interval bca_from_distribution(const BootstrapDistribution& dist, std::span<const double> scores,
                               double level, bool expanded, std::optional<BcaFactors> forced) {
  require_level(level);
  const Method method = expanded ? Method::ExpandedBCa : Method::BCa;
  const auto& m = dist.sorted_means;
  const std::size_t resamples = m.size();
  BcaDetails details;
  details.tail_probability =
      expanded ? expansion_quantile(level, dist.n) : 0.5 * (1.0 - level);

  if (m.front() == m.back()) {
    Interval iv = make_interval(dist.sample_mean, dist.sample_mean, level, method);
    iv.warnings.push_back({"degenerate-bootstrap", "all resample means are identical"});
    details.lower_rank = details.upper_rank = 1;
    iv.bca = details;
    return iv;
  }

  std::vector<Warning> warnings;
  std::optional<AdjustedTails> tails;
  if (forced) {
    details.bias = forced->bias;
    details.acceleration = forced->acceleration;
    details.bias_proportion = stat::normal_cdf(forced->bias);
  } else {
    // Ties with the sample mean are excluded; the slack absorbs summation-order noise.
    const double tie_slack = 1e-12 * std::max(1.0, std::abs(dist.sample_mean));
    const std::size_t below =
        simd::active_kernels().count_below(m.data(), resamples, dist.sample_mean - tie_slack);
    details.bias_proportion = static_cast<double>(below) / static_cast<double>(resamples);
    details.acceleration = jackknife_acceleration(scores);
    if (below == 0 || below == resamples) {
      details.percentile_fallback = true;
      warnings.push_back({"bias-undefined",
                          fmt::format("bias proportion {} leaves Phi^-1 undefined; using "
                                      "percentile positions",
                                      details.bias_proportion)});
      tails = AdjustedTails{details.tail_probability, 1.0 - details.tail_probability};
    } else {
      details.bias = stat::normal_quantile(details.bias_proportion);
    }
  }
  if (!tails) {
    try {
      tails = bca_alpha_adjust(details.bias, details.acceleration, details.tail_probability);
    } catch (const DomainError& e) {
      details.percentile_fallback = true;
      warnings.push_back({"degenerate-acceleration", e.what()});
      tails = AdjustedTails{details.tail_probability, 1.0 - details.tail_probability};
    }
  }
  details.alpha1 = tails->alpha1;
  details.alpha2 = tails->alpha2;
  details.lower_rank = order_statistic_rank(details.alpha1, resamples);
  details.upper_rank = order_statistic_rank(details.alpha2, resamples);

  Interval iv = make_interval(m[details.lower_rank - 1], m[details.upper_rank - 1], level, method);
  iv.warnings = std::move(warnings);
  warn_few_resamples(iv, resamples);
  iv.bca = details;
  return iv;
}

Interval bca_interval(std::span<const double> scores, double level, const BootstrapConfig& cfg) {
  require_level(level);
  require_n(scores.size(), 3, "BCa interval");
  return bca_from_distribution(bootstrap_means(scores, cfg), scores, level, false);
}

Interval expanded_bca_interval(std::span<const double> scores, double level,
                               const BootstrapConfig& cfg) {
  require_level(level);
  require_n(scores.size(), 3, "expanded BCa interval");
  return bca_from_distribution(bootstrap_means(scores, cfg), scores, level, true);
}

}  // namespace susci
