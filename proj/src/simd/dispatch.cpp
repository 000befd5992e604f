#include <atomic>
#include <cstdlib>
#include <string>

#include <fmt/format.h>

#include "susci/errors.hpp"
#include "susci/simd/kernels.hpp"

namespace susci::simd {

#if defined(SUSCI_HAVE_AVX2_KERNELS)
extern const KernelTable kAvx2Kernels;
#endif

namespace {

bool cpu_has(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(SUSCI_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("SUSCI_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2" && kernels_for(Isa::Avx2)) return kernels_for(Isa::Avx2);
  }
  if (const KernelTable* t = kernels_for(Isa::Avx2)) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable* kernels_for(Isa isa) {
  if (!cpu_has(isa)) return nullptr;
  switch (isa) {
    case Isa::Scalar:
      return &scalar_kernels();
    case Isa::Avx2:
#if defined(SUSCI_HAVE_AVX2_KERNELS)
      return &kAvx2Kernels;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2}) {
    if (kernels_for(isa)) out.push_back(isa);
  }
  return out;
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

void select_kernels(Isa isa) {
  const KernelTable* t = kernels_for(isa);
  if (!t) throw DomainError(fmt::format("SIMD variant {} unavailable on this machine", isa_name(isa)));
  active_slot().store(t, std::memory_order_release);
}

}  // namespace susci::simd
