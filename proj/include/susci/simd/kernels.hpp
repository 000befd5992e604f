#pragma once

// Data-parallel inner loops with a scalar reference and SIMD variants.
//
// Every variant must produce bit-identical output to the scalar reference;
// the build disables FMA contraction and the SIMD code mirrors the scalar
// expression tree operation by operation. The active table is chosen once
// at first use from CPU capabilities, overridable with SUSCI_SIMD=scalar|avx2.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace susci::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  // out[r] = (sum_j data[indices[r*n + j]]) / n for r in [0, count), summed
  // left to right.
  void (*resample_means)(const double* data, const std::uint32_t* indices, std::size_t n,
                         std::size_t count, double* out);

  // Number of xs[i] strictly below threshold.
  std::size_t (*count_below)(const double* xs, std::size_t len, double threshold);

  // out[i] = base[i] - ((sum_yy - (m*sum_y + m*sum_y)) + count*(m*m)) * inv_two_var
  // with m = mu[i]: the Gaussian log-kernel of a sample summarised by its
  // first two raw sums.
  void (*gaussian_log_kernel)(const double* mu, const double* base, std::size_t len,
                              double sum_y, double sum_yy, double count, double inv_two_var,
                              double* out);

  double (*max_value)(const double* xs, std::size_t len);
};

const KernelTable& scalar_kernels();
// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* kernels_for(Isa isa);
std::vector<Isa> available_isas();

const KernelTable& active_kernels();
// Test hook; throws DomainError when the ISA is unavailable.
void select_kernels(Isa isa);

}  // namespace susci::simd
