// Compiled with -mavx2 only; callers reach it through the dispatch table
// after a CPU check.
#include <immintrin.h>

#include <limits>

#include "susci/simd/kernels.hpp"

namespace susci::simd {
namespace {

void resample_means(const double* data, const std::uint32_t* indices, std::size_t n,
                    std::size_t count, double* out) {
  const double nd = static_cast<double>(n);
  const __m256d vn = _mm256_set1_pd(nd);
  std::size_t r = 0;
  for (; r + 4 <= count; r += 4) {
    const std::uint32_t* r0 = indices + r * n;
    const std::uint32_t* r1 = r0 + n;
    const std::uint32_t* r2 = r1 + n;
    const std::uint32_t* r3 = r2 + n;
    __m256d sum = _mm256_setzero_pd();
    for (std::size_t j = 0; j < n; ++j) {
      const __m128i idx = _mm_set_epi32(static_cast<int>(r3[j]), static_cast<int>(r2[j]),
                                        static_cast<int>(r1[j]), static_cast<int>(r0[j]));
      sum = _mm256_add_pd(sum, _mm256_i32gather_pd(data, idx, 8));
    }
    _mm256_storeu_pd(out + r, _mm256_div_pd(sum, vn));
  }
  for (; r < count; ++r) {
    const std::uint32_t* row = indices + r * n;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += data[row[j]];
    out[r] = sum / nd;
  }
}

std::size_t count_below(const double* xs, std::size_t len, double threshold) {
  const __m256d t = _mm256_set1_pd(threshold);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d v = _mm256_loadu_pd(xs + i);
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(v, t, _CMP_LT_OQ));
    c += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  for (; i < len; ++i) c += xs[i] < threshold ? 1 : 0;
  return c;
}

void gaussian_log_kernel(const double* mu, const double* base, std::size_t len, double sum_y,
                         double sum_yy, double count, double inv_two_var, double* out) {
  const __m256d vsy = _mm256_set1_pd(sum_y);
  const __m256d vsyy = _mm256_set1_pd(sum_yy);
  const __m256d vcount = _mm256_set1_pd(count);
  const __m256d vinv = _mm256_set1_pd(inv_two_var);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d m = _mm256_loadu_pd(mu + i);
    const __m256d a = _mm256_mul_pd(m, vsy);
    const __m256d q = _mm256_add_pd(_mm256_sub_pd(vsyy, _mm256_add_pd(a, a)),
                                    _mm256_mul_pd(vcount, _mm256_mul_pd(m, m)));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(base + i), _mm256_mul_pd(q, vinv)));
  }
  for (; i < len; ++i) {
    const double m = mu[i];
    const double a = m * sum_y;
    const double q = (sum_yy - (a + a)) + count * (m * m);
    out[i] = base[i] - q * inv_two_var;
  }
}

double max_value(const double* xs, std::size_t len) {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (len >= 4) {
    __m256d vbest = _mm256_set1_pd(best);
    for (; i + 4 <= len; i += 4) vbest = _mm256_max_pd(vbest, _mm256_loadu_pd(xs + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vbest);
    for (double v : lanes) best = v > best ? v : best;
  }
  for (; i < len; ++i) best = xs[i] > best ? xs[i] : best;
  return best;
}

}  // namespace

extern const KernelTable kAvx2Kernels;
const KernelTable kAvx2Kernels{Isa::Avx2, resample_means, count_below, gaussian_log_kernel,
                               max_value};

}  // namespace susci::simd
