#include "susci/simd/kernels.hpp"

#include <limits>

namespace susci::simd {
namespace {

void resample_means(const double* data, const std::uint32_t* indices, std::size_t n,
                    std::size_t count, double* out) {
  const double nd = static_cast<double>(n);
  for (std::size_t r = 0; r < count; ++r) {
    const std::uint32_t* row = indices + r * n;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += data[row[j]];
    out[r] = sum / nd;
  }
}

std::size_t count_below(const double* xs, std::size_t len, double threshold) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < len; ++i) c += xs[i] < threshold ? 1 : 0;
  return c;
}

void gaussian_log_kernel(const double* mu, const double* base, std::size_t len, double sum_y,
                         double sum_yy, double count, double inv_two_var, double* out) {
  for (std::size_t i = 0; i < len; ++i) {
    const double m = mu[i];
    const double a = m * sum_y;
    const double q = (sum_yy - (a + a)) + count * (m * m);
    out[i] = base[i] - q * inv_two_var;
  }
}

double max_value(const double* xs, std::size_t len) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < len; ++i) best = xs[i] > best ? xs[i] : best;
  return best;
}

constexpr KernelTable kScalar{Isa::Scalar, resample_means, count_below, gaussian_log_kernel,
                              max_value};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace susci::simd
