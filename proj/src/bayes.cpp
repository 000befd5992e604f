#include "susci/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "susci/errors.hpp"
#include "susci/parallel.hpp"
#include "susci/simd/kernels.hpp"

namespace susci::bayes {
namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

void validate_scores(std::span<const double> scores) {
  std::vector<ValidationIssue> issues;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double y = scores[i];
    if (!std::isfinite(y) || y < kScoreMin || y > kScoreMax) {
      issues.push_back({i + 1, 0, "score", fmt::format("score {} at position {} outside [0, 100]", y, i + 1)});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

double log_mu_prior(double mu, const PriorSpec& prior) {
  const auto& p = prior.mu_prior;
  switch (prior.kind) {
    case MuPrior::Flat:
      return 0.0;
    case MuPrior::UntruncatedNormal: {
      const double z = (mu - p.mean) / p.sd;
      return -0.5 * z * z - std::log(p.sd) - kLogSqrt2Pi;
    }
    case MuPrior::TruncatedNormal: {
      const double z = (mu - p.mean) / p.sd;
      const double mass = stat::normal_cdf((p.upper - p.mean) / p.sd) -
                          stat::normal_cdf((p.lower - p.mean) / p.sd);
      return -0.5 * z * z - std::log(p.sd) - kLogSqrt2Pi - std::log(mass);
    }
  }
  return 0.0;
}

}  // namespace

PosteriorGrid::PosteriorGrid(std::vector<double> mu_axis, std::vector<double> sigma_axis,
                             std::vector<double> joint)
    : mu_axis_(std::move(mu_axis)), sigma_axis_(std::move(sigma_axis)), joint_(std::move(joint)) {
  const std::size_t mu_n = mu_axis_.size();
  const std::size_t sigma_n = sigma_axis_.size();
  mu_marginal_.assign(mu_n, 0.0);
  sigma_marginal_.assign(sigma_n, 0.0);
  for (std::size_t i = 0; i < mu_n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < sigma_n; ++j) {
      row += joint_[i * sigma_n + j];
      sigma_marginal_[j] += joint_[i * sigma_n + j];
    }
    mu_marginal_[i] = row;
  }
}

namespace {

// log of the upper normal tail; asymptotic series once erfc underflows.
double log_normal_sf(double x) {
  if (x < 30.0) return std::log(stat::normal_sf(x));
  const double r = 1.0 / (x * x);
  return -0.5 * x * x - std::log(x) - kLogSqrt2Pi + std::log1p(r * (-1.0 + r * (3.0 - 15.0 * r)));
}

double log_tail_difference(double a, double b) {
  // log(sf(a) - sf(b)) for 0 < a < b.
  const double la = log_normal_sf(a);
  return la + std::log1p(-std::exp(log_normal_sf(b) - la));
}

}  // namespace

double log_truncation_constant(double mu, double sigma) {
  const double lo = (kScoreMin - mu) / sigma;
  const double hi = (kScoreMax - mu) / sigma;
  if (lo > 0.0) return log_tail_difference(lo, hi);
  if (hi < 0.0) return log_tail_difference(-hi, -lo);
  return std::log(1.0 - stat::normal_cdf(lo) - stat::normal_sf(hi));
}

double log_likelihood(double y, double mu, double sigma) {
  if (!(sigma > 0.0)) throw DomainError(fmt::format("sigma must be positive, got {}", sigma));
  if (!std::isfinite(y) || y < kScoreMin || y > kScoreMax) {
    throw DomainError(fmt::format("score {} outside [0, 100]", y));
  }
  const double z = (y - mu) / sigma;
  return -0.5 * z * z - kLogSqrt2Pi - std::log(sigma) - log_truncation_constant(mu, sigma);
}

PosteriorGrid posterior_grid(std::span<const double> scores, const PriorSpec& prior,
                             GridResolution resolution, std::size_t threads) {
  validate_scores(scores);
  if (!(prior.sigma_upper > 0.0)) throw ConfigError("sigma_upper must be positive");
  if (!(prior.mu_prior.sd > 0.0)) throw ConfigError("prior sd must be positive");
  if (resolution.mu_steps < 2 || resolution.sigma_steps < 1) {
    throw ConfigError("posterior grid needs mu_steps >= 2 and sigma_steps >= 1");
  }
  const std::size_t mu_n = resolution.mu_steps;
  const std::size_t sigma_n = resolution.sigma_steps;

  std::vector<double> mu_axis(mu_n), sigma_axis(sigma_n);
  for (std::size_t i = 0; i < mu_n; ++i) {
    mu_axis[i] = kScoreMin + (kScoreMax - kScoreMin) * static_cast<double>(i) /
                                 static_cast<double>(mu_n - 1);
  }
  // Starts one step above zero; sigma -> 0 is singular for n = 1.
  for (std::size_t j = 0; j < sigma_n; ++j) {
    sigma_axis[j] = prior.sigma_upper * static_cast<double>(j + 1) / static_cast<double>(sigma_n);
  }

  const double count = static_cast<double>(scores.size());
  double sum_y = 0.0, sum_yy = 0.0;
  for (double y : scores) {
    sum_y += y;
    sum_yy += y * y;
  }
  std::vector<double> log_prior(mu_n);
  for (std::size_t i = 0; i < mu_n; ++i) log_prior[i] = log_mu_prior(mu_axis[i], prior);

  // Column-major scratch: one sigma value per column, evaluated along mu.
  std::vector<double> log_post(mu_n * sigma_n);
  std::vector<double> column_max(sigma_n);
  const auto& kernels = simd::active_kernels();
  parallel_for(sigma_n, threads, [&](std::size_t j) {
    const double sigma = sigma_axis[j];
    std::vector<double> base(mu_n);
    const double log_norm = count * (std::log(sigma) + kLogSqrt2Pi);
    for (std::size_t i = 0; i < mu_n; ++i) {
      base[i] = log_prior[i] - log_norm;
      if (count > 0.0) base[i] -= count * log_truncation_constant(mu_axis[i], sigma);
    }
    double* out = log_post.data() + j * mu_n;
    kernels.gaussian_log_kernel(mu_axis.data(), base.data(), mu_n, sum_y, sum_yy, count,
                                0.5 / (sigma * sigma), out);
    column_max[j] = kernels.max_value(out, mu_n);
  });

  const double peak = *std::max_element(column_max.begin(), column_max.end());
  std::vector<double> joint(mu_n * sigma_n);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_n; ++i) {
    for (std::size_t j = 0; j < sigma_n; ++j) {
      const double w = std::exp(log_post[j * mu_n + i] - peak);
      joint[i * sigma_n + j] = w;
      total += w;
    }
  }
  for (double& w : joint) w /= total;
  return PosteriorGrid(std::move(mu_axis), std::move(sigma_axis), std::move(joint));
}

Interval credible_interval(const PosteriorGrid& grid, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError(fmt::format("credible level {} outside (0, 1)", level));
  }
  const auto& mu = grid.mu_axis();
  const auto& w = grid.mu_marginal();
  std::vector<double> cdf(mu.size(), 0.0);
  for (std::size_t i = 1; i < mu.size(); ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * (w[i - 1] + w[i]) * (mu[i] - mu[i - 1]);
  }
  const double total = cdf.back();
  for (double& c : cdf) c /= total;

  auto invert = [&](double p) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), p);
    if (it == cdf.begin()) return mu.front();
    if (it == cdf.end()) return mu.back();
    const std::size_t k = static_cast<std::size_t>(it - cdf.begin());
    const double span = cdf[k] - cdf[k - 1];
    const double frac = span > 0.0 ? (p - cdf[k - 1]) / span : 0.0;
    return mu[k - 1] + frac * (mu[k] - mu[k - 1]);
  };
  const double tail = 0.5 * (1.0 - level);
  Interval iv;
  iv.lower = std::clamp(invert(tail), kScoreMin, kScoreMax);
  iv.upper = std::clamp(invert(1.0 - tail), kScoreMin, kScoreMax);
  iv.level = level;
  iv.method = Method::Bayes;
  iv.diagnostics = interval_diagnostics(iv.lower, iv.upper);
  return iv;
}

double posterior_mean(const PosteriorGrid& grid) {
  double m = 0.0;
  const auto& mu = grid.mu_axis();
  const auto& w = grid.mu_marginal();
  for (std::size_t i = 0; i < mu.size(); ++i) m += mu[i] * w[i];
  return m;
}

double posterior_mode(const PosteriorGrid& grid) {
  const auto& w = grid.mu_marginal();
  const auto it = std::max_element(w.begin(), w.end());
  return grid.mu_axis()[static_cast<std::size_t>(it - w.begin())];
}

}  // namespace susci::bayes
