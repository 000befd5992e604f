// Invariants over randomly generated studies.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "susci/decision.hpp"
#include "susci/errors.hpp"
#include "susci/intervals.hpp"
#include "susci/rng.hpp"
#include "susci/stat_kernel.hpp"
#include "susci/sus_core.hpp"

using namespace susci;

namespace {

// Scores on the 2.5 grid, from a random per-study centre so that studies
// range from tightly clustered to widely spread.
std::vector<double> random_study(Rng& rng, std::size_t n) {
  const int centre = static_cast<int>(rng.index(41));
  const int spread = 1 + static_cast<int>(rng.index(20));
  std::vector<double> xs(n);
  for (auto& x : xs) {
    const int step = std::clamp(centre + static_cast<int>(rng.index(2 * spread + 1)) - spread, 0, 40);
    x = 2.5 * step;
  }
  return xs;
}

}  // namespace

TEST_CASE("bootstrap intervals lie within the data range", "[property][bootstrap]") {
  Rng rng(424242);
  std::size_t failures = 0, bca_checked = 0;
  for (int study = 0; study < 10000; ++study) {
    const std::size_t n = 2 + rng.index(19);
    const auto xs = random_study(rng, n);
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    const BootstrapConfig cfg{200, rng.next_u64(), false, 1};
    const auto dist = bootstrap_means(xs, cfg);
    auto inside = [&](const Interval& iv) { return *lo <= iv.lower && iv.lower <= iv.upper && iv.upper <= *hi; };
    failures += !inside(percentile_from_distribution(dist, 0.95, 0.025));
    failures += !inside(percentile_from_distribution(dist, 0.95, expansion_quantile(0.95, n)));
    if (n >= 3) {
      try {
        failures += !inside(bca_from_distribution(dist, xs, 0.95, false));
        failures += !inside(bca_from_distribution(dist, xs, 0.95, true));
        ++bca_checked;
      } catch (const DomainError&) {
        // Adjustment undefined for this draw; checked separately below.
      }
    }
  }
  CHECK(failures == 0);
  CHECK(bca_checked > 9000);
}

TEST_CASE("t interval is symmetric about the sample mean", "[property][t]") {
  Rng rng(77);
  for (int study = 0; study < 2000; ++study) {
    const auto xs = random_study(rng, 2 + rng.index(30));
    const auto s = study_summary(xs);
    for (const double level : {0.8, 0.9, 0.95, 0.99}) {
      const auto iv = t_interval(s, level);
      const double m = s.summary.mean;
      CHECK(iv.upper - m == Catch::Approx(m - iv.lower).margin(1e-9));
      const auto z = z_interval(s, level);
      CHECK(z.upper - m == Catch::Approx(m - z.lower).margin(1e-9));
      CHECK(iv.upper - iv.lower >= z.upper - z.lower - 1e-12);
    }
  }
}

TEST_CASE("BCa with zero bias and acceleration reduces to the percentile interval",
          "[property][bca]") {
  Rng rng(31337);
  for (int study = 0; study < 2000; ++study) {
    const std::size_t n = 3 + rng.index(18);
    const auto xs = random_study(rng, n);
    const auto dist = bootstrap_means(xs, {1000, rng.next_u64(), false, 1});
    for (const double level : {0.9, 0.95}) {
      const double tail = 0.5 * (1.0 - level);
      const auto bca = bca_from_distribution(dist, xs, level, false, BcaFactors{0.0, 0.0});
      const auto pct = percentile_from_distribution(dist, level, tail);
      REQUIRE(bca.lower == pct.lower);
      REQUIRE(bca.upper == pct.upper);
      const auto ebca = bca_from_distribution(dist, xs, level, true, BcaFactors{0.0, 0.0});
      const auto epct = percentile_from_distribution(dist, level, expansion_quantile(level, n));
      REQUIRE(ebca.lower == epct.lower);
      REQUIRE(ebca.upper == epct.upper);
    }
  }
}

TEST_CASE("BCa tail adjustment is monotone and neutral at zero", "[property][bca]") {
  for (const double alpha_half : {0.005, 0.025, 0.05}) {
    const auto neutral = bca_alpha_adjust(0.0, 0.0, alpha_half);
    CHECK(neutral.alpha1 == Catch::Approx(alpha_half).epsilon(1e-12));
    CHECK(neutral.alpha2 == Catch::Approx(1.0 - alpha_half).epsilon(1e-12));
    double prev1 = 0.0;
    for (double b = -1.0; b <= 1.0; b += 0.1) {
      const auto t = bca_alpha_adjust(b, 0.05, alpha_half);
      CHECK(t.alpha1 > prev1);
      CHECK(t.alpha1 < t.alpha2);
      prev1 = t.alpha1;
    }
  }
}

TEST_CASE("quantile and CDF round-trips", "[property][stat]") {
  Rng rng(5);
  for (int k = 0; k < 5000; ++k) {
    const double p = 1e-6 + (1.0 - 2e-6) * rng.uniform();
    CHECK(stat::normal_cdf(stat::normal_quantile(p)) == Catch::Approx(p).margin(1e-8));
    const int df = 1 + static_cast<int>(rng.index(60));
    CHECK(stat::t_cdf(stat::t_quantile(p, df), df) == Catch::Approx(p).margin(1e-8));
    const stat::TruncatedNormalParams tn{100.0 * rng.uniform(), 1.0 + 30.0 * rng.uniform(), 0.0, 100.0};
    const double x = stat::truncated_normal_quantile(p, tn);
    CHECK(stat::truncated_normal_cdf(x, tn) == Catch::Approx(p).margin(1e-8));
  }
}

TEST_CASE("fixed seeds give thread-count independent results", "[property][determinism]") {
  Rng rng(99);
  for (int study = 0; study < 20; ++study) {
    const auto xs = random_study(rng, 3 + rng.index(15));
    const std::uint64_t seed = rng.next_u64();
    AnalysisOptions one;
    one.bootstrap = {5000, seed, false, 1};
    one.grid = {201, 100};
    AnalysisOptions many = one;
    many.bootstrap.threads = 6;
    many.threads = 6;
    const auto a = select_interval(study_summary(xs), one);
    const auto b = select_interval(study_summary(xs), many);
    REQUIRE(a.intervals.size() == b.intervals.size());
    for (std::size_t i = 0; i < a.intervals.size(); ++i) {
      CHECK(a.intervals[i].interval.lower == b.intervals[i].interval.lower);
      CHECK(a.intervals[i].interval.upper == b.intervals[i].interval.upper);
    }
    const auto again = select_interval(study_summary(xs), one);
    CHECK(again.selected.lower == a.selected.lower);
    CHECK(again.selected.upper == a.selected.upper);
  }
}
