#pragma once

// Distribution and moment functions shared by every other module.
//
// Everything here is a pure function of its arguments. Random draws take an
// explicit Rng so that callers control stream derivation.

#include <cstddef>
#include <span>
#include <vector>

namespace susci {

class Rng;

namespace stat {

// Supremum of |skewness| over the skew-normal family.
inline constexpr double kSkewNormalMaxSkewness = 0.9952719;

struct SkewNormalParams {
  double location = 0.0;  // xi
  double scale = 1.0;     // omega > 0
  double shape = 0.0;     // alpha

  // delta = alpha / sqrt(1 + alpha^2)
  double delta() const;
  double mean() const;
  double sd() const;
  double skewness() const;
};

struct TruncatedNormalParams {
  double mean = 0.0;
  double sd = 1.0;
  double lower = 0.0;
  double upper = 1.0;
};

double normal_pdf(double x);
double normal_cdf(double x);
// Upper tail 1 - Phi(x) without cancellation.
double normal_sf(double x);
double normal_quantile(double p);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

double t_pdf(double x, int df);
double t_cdf(double x, int df);
double t_quantile(double p, int df);

// Adjusted Fisher-Pearson coefficient G1 = g1 * sqrt(n(n-1)) / (n-2).
double sample_skewness(std::span<const double> xs);

// Moment matching onto Azzalini's family. Throws DomainError when
// |skew| >= kSkewNormalMaxSkewness or sd <= 0.
SkewNormalParams skew_normal_from_moments(double mean, double sd, double skew);
double skew_normal_pdf(double x, const SkewNormalParams& params);
double skew_normal_draw(const SkewNormalParams& params, Rng& rng);
std::vector<double> skew_normal_sample(const SkewNormalParams& params, std::size_t n, Rng& rng);

double truncated_normal_cdf(double x, const TruncatedNormalParams& params);
double truncated_normal_quantile(double p, const TruncatedNormalParams& params);

// Leading-order Edgeworth density of the studentized mean:
// phi(x) - n^{-1/2} (lambda3 / 6) phi'''(x). May be negative; reported as-is.
double edgeworth_density(double x, std::size_t n, double lambda3);

}  // namespace stat
}  // namespace susci
