#include "susci/stat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "susci/errors.hpp"
#include "susci/rng.hpp"

namespace susci {

namespace stat {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError(fmt::format("{}: probability {} outside (0, 1)", what, p));
  }
}

void require_df(int df) {
  if (df < 1) throw DomainError(fmt::format("degrees of freedom {} < 1", df));
}

// Acklam's rational approximation to the lower-tail normal quantile.
double acklam_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Quantile for p <= 0.5, refined with Halley steps against erfc.
double lower_normal_quantile(double p) {
  double x = acklam_quantile(p);
  for (int iter = 0; iter < 3; ++iter) {
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    const double step = u / (1.0 + 0.5 * x * u);
    x -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

// I_x(a, b) given both x and y = 1 - x, each computed without cancellation.
double incomplete_beta_xy(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

// P(T <= t) for t <= 0.
double t_lower_tail(double t, int df) {
  const double nu = static_cast<double>(df);
  const double t2 = t * t;
  const double x = nu / (nu + t2);
  const double y = t2 / (nu + t2);
  return 0.5 * incomplete_beta_xy(0.5 * nu, 0.5, x, y);
}

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double normal_quantile(double p) {
  require_probability(p, "normal_quantile");
  if (p == 0.5) return 0.0;
  if (p < 0.5) return lower_normal_quantile(p);
  return -lower_normal_quantile(1.0 - p);
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("incomplete_beta: shape parameters must be positive");
  if (x < 0.0 || x > 1.0) throw DomainError("incomplete_beta: x outside [0, 1]");
  return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double t_pdf(double x, int df) {
  require_df(df);
  const double nu = static_cast<double>(df);
  const double log_c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                       0.5 * std::log(nu * std::numbers::pi);
  return std::exp(log_c - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

double t_cdf(double x, int df) {
  require_df(df);
  if (x == 0.0) return 0.5;
  if (x < 0.0) return t_lower_tail(x, df);
  return 1.0 - t_lower_tail(-x, df);
}

double t_quantile(double p, int df) {
  require_probability(p, "t_quantile");
  require_df(df);
  if (p == 0.5) return 0.0;
  const bool upper = p > 0.5;
  const double tail = upper ? 1.0 - p : p;

  double t;
  if (df == 1) {
    t = -1.0 / std::tan(std::numbers::pi * tail);
  } else if (df == 2) {
    t = (2.0 * tail - 1.0) / std::sqrt(2.0 * tail * (1.0 - tail));
  } else {
    // Cornish-Fisher start, then safeguarded Newton on log F.
    const double z = lower_normal_quantile(tail);
    const double nu = static_cast<double>(df);
    const double z3 = z * z * z, z5 = z3 * z * z, z7 = z5 * z * z;
    const double g1 = (z3 + z) / 4.0;
    const double g2 = (5.0 * z5 + 16.0 * z3 + 3.0 * z) / 96.0;
    const double g3 = (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / 384.0;
    t = z + g1 / nu + g2 / (nu * nu) + g3 / (nu * nu * nu);
    if (!(t < 0.0) || !std::isfinite(t)) t = z;

    double hi = 0.0;
    double lo = std::min(t, -1.0);
    while (t_lower_tail(lo, df) > tail) lo *= 2.0;
    if (t <= lo || t >= hi) t = 0.5 * (lo + hi);
    const double log_tail = std::log(tail);
    for (int iter = 0; iter < 200; ++iter) {
      const double f = t_lower_tail(t, df);
      if (f > tail) hi = t; else lo = t;
      const double g = std::log(f) - log_tail;
      const double slope = t_pdf(t, df) / f;
      double next = t - g / slope;
      if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - t);
      t = next;
      if (step <= 1e-14 * std::max(1.0, std::abs(t))) break;
    }
  }
  return upper ? -t : t;
}

double sample_skewness(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 3) throw DomainError(fmt::format("sample skewness needs n >= 3, got {}", n));
  double sum = 0.0, scale = 0.0;
  for (double x : xs) {
    sum += x;
    scale = std::max(scale, std::abs(x));
  }
  const double mean = sum / static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  const double floor = 1e-14 * std::max(scale, 1e-300);
  if (!(m2 > floor * floor)) throw UndefinedStatistic("skewness undefined: zero variance");
  const double g1 = m3 / std::pow(m2, 1.5);
  const double nd = static_cast<double>(n);
  return g1 * std::sqrt(nd * (nd - 1.0)) / (nd - 2.0);
}

double SkewNormalParams::delta() const { return shape / std::sqrt(1.0 + shape * shape); }

double SkewNormalParams::mean() const {
  return location + scale * delta() * std::sqrt(2.0 / std::numbers::pi);
}

double SkewNormalParams::sd() const {
  const double d = delta();
  return scale * std::sqrt(1.0 - 2.0 * d * d / std::numbers::pi);
}

double SkewNormalParams::skewness() const {
  const double mz = delta() * std::sqrt(2.0 / std::numbers::pi);
  return 0.5 * (4.0 - std::numbers::pi) * mz * mz * mz / std::pow(1.0 - mz * mz, 1.5);
}

SkewNormalParams skew_normal_from_moments(double mean, double sd, double skew) {
  if (!(sd > 0.0)) throw DomainError(fmt::format("skew-normal sd must be positive, got {}", sd));
  if (!(std::abs(skew) < kSkewNormalMaxSkewness)) {
    throw DomainError(fmt::format("skewness {} unattainable by the skew-normal family (|skew| < {})",
                                  skew, kSkewNormalMaxSkewness));
  }
  if (skew == 0.0) return {mean, sd, 0.0};

  // gamma1 = ((4 - pi) / 2) * u^3 with u = mz / sqrt(1 - mz^2).
  const double u = std::cbrt(2.0 * skew / (4.0 - std::numbers::pi));
  double mz = u / std::sqrt(1.0 + u * u);
  double delta = mz * std::sqrt(0.5 * std::numbers::pi);

  auto skew_of = [](double dlt) {
    const double m = dlt * std::sqrt(2.0 / std::numbers::pi);
    return 0.5 * (4.0 - std::numbers::pi) * m * m * m / std::pow(1.0 - m * m, 1.5);
  };
  if (std::abs(skew_of(delta) - skew) > 1e-10) {
    for (int iter = 0; iter < 50; ++iter) {
      const double h = 1e-7;
      const double f = skew_of(delta) - skew;
      const double df = (skew_of(delta + h) - skew_of(delta - h)) / (2.0 * h);
      delta -= f / df;
      if (std::abs(f) < 1e-14) break;
    }
    mz = delta * std::sqrt(2.0 / std::numbers::pi);
  }
  delta = std::clamp(delta, -1.0 + 1e-15, 1.0 - 1e-15);

  SkewNormalParams params;
  params.shape = delta / std::sqrt(1.0 - delta * delta);
  params.scale = sd / std::sqrt(1.0 - mz * mz);
  params.location = mean - params.scale * mz;
  return params;
}

double skew_normal_pdf(double x, const SkewNormalParams& params) {
  const double z = (x - params.location) / params.scale;
  return 2.0 / params.scale * normal_pdf(z) * normal_cdf(params.shape * z);
}

double skew_normal_draw(const SkewNormalParams& params, Rng& rng) {
  const double d = params.delta();
  const double z0 = std::abs(rng.normal());
  const double z1 = rng.normal();
  return params.location + params.scale * (d * z0 + std::sqrt(1.0 - d * d) * z1);
}

std::vector<double> skew_normal_sample(const SkewNormalParams& params, std::size_t n, Rng& rng) {
  std::vector<double> out(n);
  for (double& x : out) x = skew_normal_draw(params, rng);
  return out;
}

namespace {
void require_truncated(const TruncatedNormalParams& t) {
  if (!(t.sd > 0.0)) throw DomainError("truncated normal sd must be positive");
  if (!(t.lower < t.upper)) throw DomainError("truncated normal needs lower < upper");
}
}  // namespace

double truncated_normal_cdf(double x, const TruncatedNormalParams& t) {
  require_truncated(t);
  if (x <= t.lower) return 0.0;
  if (x >= t.upper) return 1.0;
  const double fa = normal_cdf((t.lower - t.mean) / t.sd);
  const double fb = normal_cdf((t.upper - t.mean) / t.sd);
  return (normal_cdf((x - t.mean) / t.sd) - fa) / (fb - fa);
}

double truncated_normal_quantile(double p, const TruncatedNormalParams& t) {
  require_probability(p, "truncated_normal_quantile");
  require_truncated(t);
  const double alpha = (t.lower - t.mean) / t.sd;
  const double beta = (t.upper - t.mean) / t.sd;
  double x;
  if (p <= 0.5) {
    const double fa = normal_cdf(alpha);
    const double fb = normal_cdf(beta);
    x = t.mean + t.sd * normal_quantile(fa + p * (fb - fa));
  } else {
    const double sa = normal_sf(alpha);
    const double sb = normal_sf(beta);
    x = t.mean - t.sd * normal_quantile(sb + (1.0 - p) * (sa - sb));
  }
  return std::clamp(x, t.lower, t.upper);
}

double edgeworth_density(double x, std::size_t n, double lambda3) {
  if (n < 1) throw DomainError("edgeworth_density needs n >= 1");
  const double phi = normal_pdf(x);
  const double phi3 = (3.0 * x - x * x * x) * phi;
  return phi - lambda3 / 6.0 * phi3 / std::sqrt(static_cast<double>(n));
}

}  // namespace stat
}  // namespace susci
