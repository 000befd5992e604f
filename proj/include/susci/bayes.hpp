#pragma once

// Empirical Bayes posterior for (mu, sigma) under a normal likelihood
// truncated to [0, 100], evaluated by deterministic grid quadrature.

#include <cstddef>
#include <span>
#include <vector>

#include "susci/intervals.hpp"
#include "susci/stat_kernel.hpp"

namespace susci::bayes {

enum class MuPrior {
  TruncatedNormal,  // the model prior
  UntruncatedNormal,
  Flat,             // likelihood-only checks
};

struct PriorSpec {
  stat::TruncatedNormalParams mu_prior{70.0, 12.0, 0.0, 100.0};
  double sigma_upper = 30.0;  // sigma ~ Uniform(0, sigma_upper)
  MuPrior kind = MuPrior::TruncatedNormal;
};

struct GridResolution {
  std::size_t mu_steps = 1001;
  std::size_t sigma_steps = 600;
};

class PosteriorGrid {
 public:
  PosteriorGrid(std::vector<double> mu_axis, std::vector<double> sigma_axis,
                std::vector<double> joint);

  const std::vector<double>& mu_axis() const noexcept { return mu_axis_; }
  const std::vector<double>& sigma_axis() const noexcept { return sigma_axis_; }
  const std::vector<double>& mu_marginal() const noexcept { return mu_marginal_; }
  const std::vector<double>& sigma_marginal() const noexcept { return sigma_marginal_; }
  // Normalised mass at (mu_axis[i], sigma_axis[j]).
  double joint(std::size_t i, std::size_t j) const { return joint_[i * sigma_axis_.size() + j]; }
  const std::vector<double>& joint_masses() const noexcept { return joint_; }

 private:
  std::vector<double> mu_axis_;
  std::vector<double> sigma_axis_;
  std::vector<double> joint_;  // row-major, mu by sigma
  std::vector<double> mu_marginal_;
  std::vector<double> sigma_marginal_;
};

// log of the [0, 100]-truncated normal density at y.
double log_likelihood(double y, double mu, double sigma);
// log(Phi((100 - mu) / sigma) - Phi(-mu / sigma)).
double log_truncation_constant(double mu, double sigma);

// n = 0 is allowed and recovers the prior.
PosteriorGrid posterior_grid(std::span<const double> scores, const PriorSpec& prior = {},
                             GridResolution resolution = {}, std::size_t threads = 1);

// Equal-tailed interval from the piecewise-linear mu-marginal CDF.
Interval credible_interval(const PosteriorGrid& grid, double level);
double posterior_mean(const PosteriorGrid& grid);
// Grid node with the largest mu-marginal mass.
double posterior_mode(const PosteriorGrid& grid);

}  // namespace susci::bayes
