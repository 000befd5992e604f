// Scalar and SIMD kernels must agree bit for bit.

#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <vector>

#include "susci/errors.hpp"
#include "susci/intervals.hpp"
#include "susci/bayes.hpp"
#include "susci/rng.hpp"
#include "susci/simd/kernels.hpp"

using namespace susci;

namespace {

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct RestoreKernels {
  simd::Isa saved = simd::active_kernels().isa;
  ~RestoreKernels() { simd::select_kernels(saved); }
};

}  // namespace

TEST_CASE("every available kernel table matches the scalar reference", "[simd]") {
  const auto& ref = simd::scalar_kernels();
  Rng rng(314);
  for (simd::Isa isa : simd::available_isas()) {
    const auto* k = simd::kernels_for(isa);
    REQUIRE(k != nullptr);
    INFO("isa = " << simd::isa_name(isa));
    for (std::size_t n : {1u, 2u, 3u, 5u, 9u, 17u, 40u}) {
      for (std::size_t count : {1u, 3u, 4u, 7u, 64u, 2049u}) {
        std::vector<double> data(n);
        for (auto& d : data) d = 2.5 * rng.index(41);
        std::vector<std::uint32_t> idx(n * count);
        for (auto& i : idx) i = rng.index(static_cast<std::uint32_t>(n));
        std::vector<double> a(count), b(count);
        ref.resample_means(data.data(), idx.data(), n, count, a.data());
        k->resample_means(data.data(), idx.data(), n, count, b.data());
        CHECK(bit_equal(a, b));
      }
    }
    for (std::size_t len : {0u, 1u, 3u, 4u, 5u, 1001u}) {
      std::vector<double> xs(len), base(len), a(len), b(len);
      for (std::size_t i = 0; i < len; ++i) {
        xs[i] = 100.0 * rng.uniform();
        base[i] = -50.0 * rng.uniform();
      }
      CHECK(ref.count_below(xs.data(), len, 50.0) == k->count_below(xs.data(), len, 50.0));
      if (len > 0) CHECK(ref.max_value(base.data(), len) == k->max_value(base.data(), len));
      ref.gaussian_log_kernel(xs.data(), base.data(), len, 452.5, 41281.25, 5.0, 1.0 / 18.0,
                              a.data());
      k->gaussian_log_kernel(xs.data(), base.data(), len, 452.5, 41281.25, 5.0, 1.0 / 18.0,
                             b.data());
      CHECK(bit_equal(a, b));
    }
  }
}

TEST_CASE("bootstrap and posterior are identical under each dispatch", "[simd]") {
  RestoreKernels restore;
  const std::vector<double> xs{97.5, 97.5, 97.5, 80, 80, 62.5, 75};
  std::vector<std::vector<double>> means, mu_marginals;
  for (simd::Isa isa : simd::available_isas()) {
    simd::select_kernels(isa);
    means.push_back(bootstrap_means(xs, {5000, 11, false, 1}).sorted_means);
    mu_marginals.push_back(bayes::posterior_grid(xs, {}, {201, 120}).mu_marginal());
  }
  for (std::size_t k = 1; k < means.size(); ++k) {
    CHECK(bit_equal(means[0], means[k]));
    CHECK(bit_equal(mu_marginals[0], mu_marginals[k]));
  }
}

TEST_CASE("dispatch reporting", "[simd]") {
  const auto isas = simd::available_isas();
  REQUIRE(!isas.empty());
  CHECK(isas.front() == simd::Isa::Scalar);
  CHECK(simd::isa_name(simd::Isa::Scalar) == "scalar");
  CHECK(simd::isa_name(simd::Isa::Avx2) == "avx2");
  if (simd::kernels_for(simd::Isa::Avx2) == nullptr) {
    CHECK_THROWS_AS(simd::select_kernels(simd::Isa::Avx2), DomainError);
  }
}
