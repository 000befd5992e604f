#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "susci/bayes.hpp"
#include "susci/errors.hpp"
#include "susci/rng.hpp"
#include "susci/stat_kernel.hpp"

using namespace susci;
using Catch::Approx;

TEST_CASE("log likelihood of the truncated normal", "[bayes]") {
  const double mu = 70, sigma = 15, y = 85;
  const double z = (y - mu) / sigma;
  const double mass = stat::normal_cdf((100 - mu) / sigma) - stat::normal_cdf(-mu / sigma);
  const double expected = std::log(stat::normal_pdf(z) / sigma / mass);
  CHECK(bayes::log_likelihood(y, mu, sigma) == Approx(expected).epsilon(1e-12));
  // Stable far outside the support.
  CHECK(std::isfinite(bayes::log_truncation_constant(160.0, 2.0)));
  CHECK(std::isfinite(bayes::log_truncation_constant(-80.0, 1.0)));
  CHECK(bayes::log_truncation_constant(50, 1) == Approx(0.0).margin(1e-15));
  CHECK_THROWS_AS(bayes::log_likelihood(101, 50, 10), DomainError);
  CHECK_THROWS_AS(bayes::log_likelihood(50, 50, 0), DomainError);
}

TEST_CASE("zero data recovers the truncated-normal prior", "[bayes]") {
  const auto grid = bayes::posterior_grid({});
  const Interval ci = bayes::credible_interval(grid, 0.95);
  const stat::TruncatedNormalParams prior{70, 12, 0, 100};
  CHECK(ci.lower == Approx(stat::truncated_normal_quantile(0.025, prior)).margin(0.1));
  CHECK(ci.upper == Approx(stat::truncated_normal_quantile(0.975, prior)).margin(0.1));
  CHECK(ci.lower == Approx(46.44).margin(0.1));
  CHECK(ci.upper == Approx(92.36).margin(0.1));
  CHECK(ci.method == Method::Bayes);
}

TEST_CASE("grid refinement barely moves the bounds", "[bayes]") {
  for (const auto& xs : {std::vector<double>{}, susci::testing::kWorkedExample,
                         std::vector<double>{35, 42.5, 60, 72.5, 77.5, 90}}) {
    const auto coarse = bayes::credible_interval(bayes::posterior_grid(xs), 0.95);
    const auto fine = bayes::credible_interval(bayes::posterior_grid(xs, {}, {2001, 1200}), 0.95);
    CHECK(std::abs(coarse.lower - fine.lower) < 0.05);
    CHECK(std::abs(coarse.upper - fine.upper) < 0.05);
  }
}

TEST_CASE("grid posterior agrees with brute-force quadrature", "[bayes]") {
  // Direct evaluation of prior x likelihood on a coarse grid, no sufficient statistics.
  const std::vector<double> xs{67.5, 80, 92.5};
  const bayes::GridResolution res{101, 60};
  const auto grid = bayes::posterior_grid(xs, {}, res);
  std::vector<double> w(res.mu_steps, 0.0);
  double total = 0;
  for (std::size_t i = 0; i < res.mu_steps; ++i) {
    const double mu = i;
    const double prior = stat::normal_pdf((mu - 70) / 12);
    for (std::size_t j = 0; j < res.sigma_steps; ++j) {
      const double sigma = 30.0 * (j + 1) / res.sigma_steps;
      double ll = 0;
      for (double y : xs) ll += bayes::log_likelihood(y, mu, sigma);
      w[i] += prior * std::exp(ll);
    }
    total += w[i];
  }
  for (std::size_t i = 0; i < res.mu_steps; ++i) {
    CHECK(grid.mu_marginal()[i] == Approx(w[i] / total).margin(1e-12).epsilon(1e-9));
  }
}

TEST_CASE("posterior mean shrinks toward the prior for concentrated data", "[bayes][property]") {
  Rng rng(77);
  for (int k = 0; k < 40; ++k) {
    const std::size_t n = 20 + rng.index(21);
    const int centre = 10 + static_cast<int>(rng.index(17));  // scores 25..65
    std::vector<double> xs(n);
    double s = 0;
    for (auto& x : xs) {
      x = 2.5 * (centre + static_cast<int>(rng.index(9)) - 4);
      s += x;
    }
    const double xbar = s / n;
    const double pm = bayes::posterior_mean(bayes::posterior_grid(xs, {}, {501, 300}));
    INFO("n=" << n << " xbar=" << xbar << " posterior mean=" << pm);
    CHECK(pm > xbar);
    CHECK(pm < 70.0);
  }
}

TEST_CASE("truncation can carry the posterior mean past both anchors", "[bayes]") {
  // Widely spread small samples favour large sigma, where the truncation
  // constant falls with mu and lifts the likelihood of high means.
  const std::vector<double> xs{100, 30};
  const double pm = bayes::posterior_mean(bayes::posterior_grid(xs, {}, {501, 300}));
  CHECK(pm > 70.0);
  const std::vector<double> three{57.5, 65, 85};
  CHECK(bayes::posterior_mean(bayes::posterior_grid(three)) > 70.0);
}

TEST_CASE("posterior concentrates with data and flat prior tracks the likelihood", "[bayes]") {
  std::vector<double> xs(200);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 55 + 2.5 * (i % 9);
  const auto grid = bayes::posterior_grid(xs);
  const auto ci = bayes::credible_interval(grid, 0.95);
  CHECK(ci.upper - ci.lower < 3.0);
  bayes::PriorSpec flat;
  flat.kind = bayes::MuPrior::Flat;
  CHECK(bayes::posterior_mode(bayes::posterior_grid(xs, flat)) == Approx(65.0).margin(0.2));
  CHECK_THROWS_AS(bayes::credible_interval(grid, 1.5), DomainError);
  CHECK_THROWS_AS(bayes::posterior_grid(std::vector<double>{120}), ValidationError);
}

TEST_CASE("posterior is independent of thread count", "[bayes][determinism]") {
  const auto a = bayes::posterior_grid(susci::testing::kWorkedExample, {}, {1001, 600}, 1);
  const auto b = bayes::posterior_grid(susci::testing::kWorkedExample, {}, {1001, 600}, 3);
  CHECK(a.joint_masses() == b.joint_masses());
}
