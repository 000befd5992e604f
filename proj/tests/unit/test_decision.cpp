#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "fixtures.hpp"
#include "susci/decision.hpp"
#include "susci/errors.hpp"
#include "susci/rng.hpp"

using namespace susci;
using Catch::Approx;

namespace {

Interval make(double lo, double hi, Method m) {
  Interval iv;
  iv.lower = lo;
  iv.upper = hi;
  iv.method = m;
  iv.diagnostics = interval_diagnostics(lo, hi);
  return iv;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_CASE("rules partition the positive integers", "[decision]") {
  CHECK_THROWS_AS(recommend(0), DomainError);
  for (std::size_t n = 1; n <= 200; ++n) {
    const auto plan = recommend(n);
    const Rule expected = n <= 5 ? Rule::Rule1_nLE5 : n <= 8 ? Rule::Rule2_n6to8 : Rule::Rule3_nGE9;
    CHECK(plan.rule_fired == expected);
  }
  CHECK(recommend(5).recommended == std::vector<Method>{Method::Bayes});
  CHECK(recommend(5).caveat.value() == kBayesCaveat);
  CHECK(recommend(6).recommended == std::vector<Method>{Method::ExpandedBCa});
  CHECK(recommend(8).rule_fired == Rule::Rule2_n6to8);
  CHECK(recommend(9).recommended == (std::vector<Method>{Method::T, Method::ExpandedBCa}));
  CHECK_FALSE(recommend(9).caveat);
}

TEST_CASE("Rule 3 selection", "[decision]") {
  SECTION("violating t is discarded") {
    const auto t = make(81.0, 101.2, Method::T);
    const auto b = make(82.0, 99.0, Method::ExpandedBCa);
    CHECK(&rule3_select(t, b) == &b);
  }
  SECTION("narrower abiding t wins") {
    const auto t = make(60, 80, Method::T);
    const auto b = make(59, 81, Method::ExpandedBCa);
    CHECK(&rule3_select(t, b) == &t);
  }
  SECTION("narrower BCa wins") {
    const auto t = make(60, 80, Method::T);
    const auto b = make(61, 79, Method::ExpandedBCa);
    CHECK(&rule3_select(t, b) == &b);
  }
  SECTION("ties prefer t") {
    const auto t = make(60, 80, Method::T);
    const auto b = make(61, 81 - 5e-10, Method::ExpandedBCa);
    CHECK(&rule3_select(t, b) == &t);
  }
}

TEST_CASE("select_interval end to end", "[decision]") {
  AnalysisOptions opts;
  opts.bootstrap = {5000, 3, false, 1};
  opts.grid = {501, 300};

  SECTION("n = 5 selects the Bayes credible interval") {
    const auto r = select_interval(study_summary(susci::testing::kWorkedExample), opts);
    CHECK(r.plan.rule_fired == Rule::Rule1_nLE5);
    CHECK(r.selected.method == Method::Bayes);
    CHECK(std::any_of(r.selected.warnings.begin(), r.selected.warnings.end(),
                      [](const Warning& w) { return w.code == "credible-interval"; }));
    CHECK(std::any_of(r.warnings.begin(), r.warnings.end(),
                      [](const Warning& w) { return w.message == kBayesCaveat; }));
    CHECK(r.intervals.size() == 7);
    CHECK(r.labels.size() == 4);
    CHECK(r.find(Method::T)->recommended == false);
    CHECK(r.find(Method::Bayes)->recommended == true);
  }
  SECTION("high-mean n = 9 study selects expanded BCa over a violating t") {
    const std::vector<double> xs{100, 100, 97.5, 100, 100, 77.5, 100, 100, 95};
    const auto r = select_interval(study_summary(xs), opts);
    REQUIRE(r.find(Method::T)->interval.upper > 100.0);
    CHECK(r.plan.rule_fired == Rule::Rule3_nGE9);
    CHECK(r.selected.method == Method::ExpandedBCa);
  }
  SECTION("explicit non-recommended method warns") {
    AnalysisOptions o = opts;
    o.method = Method::T;
    const auto r = select_interval(study_summary(susci::testing::kWorkedExample), o);
    CHECK(r.selected.method == Method::T);
    CHECK(r.method_was_explicit);
    CHECK(std::any_of(r.warnings.begin(), r.warnings.end(),
                      [](const Warning& w) { return w.code == "not-recommended"; }));
    CHECK(std::any_of(r.warnings.begin(), r.warnings.end(),
                      [](const Warning& w) { return w.code == "bound-violation"; }));
  }
  SECTION("single score only has the Bayes interval") {
    const auto r = select_interval(study_summary(std::vector<double>{72.5}), opts);
    CHECK(r.intervals.size() == 1);
    CHECK(r.selected.method == Method::Bayes);
    AnalysisOptions o = opts;
    o.method = Method::T;
    CHECK_THROWS_AS(select_interval(study_summary(std::vector<double>{72.5}), o), DomainError);
  }
  SECTION("unclamped nine-item scores above 100 skip the Bayes model") {
    std::vector<double> xs(7, 100.08);
    xs[0] = 80;
    const auto r = select_interval(study_summary(xs), opts);
    CHECK(r.find(Method::Bayes) == nullptr);
    CHECK(r.selected.method == Method::ExpandedBCa);
    CHECK_THROWS_AS(select_interval(study_summary(std::vector<double>{100.08, 90, 80}), opts),
                    ValidationError);
  }
  SECTION("selected never violates when some candidate abides") {
    Rng rng(8);
    for (int k = 0; k < 40; ++k) {
      const std::size_t n = 2 + rng.index(14);
      std::vector<double> xs(n);
      for (auto& x : xs) x = 2.5 * (28 + rng.index(13));
      AnalysisOptions o = opts;
      o.bootstrap.resamples = 1000;
      o.grid = {201, 100};
      const auto r = select_interval(study_summary(xs), o);
      const bool any_abides =
          std::any_of(r.intervals.begin(), r.intervals.end(), [](const MethodOutcome& m) {
            return !m.interval.diagnostics.violates_lower && !m.interval.diagnostics.violates_upper;
          });
      if (any_abides) {
        CHECK_FALSE(r.selected.diagnostics.violates_upper);
        CHECK_FALSE(r.selected.diagnostics.violates_lower);
      }
    }
  }
}

TEST_CASE("shipped scales", "[decision][scales]") {
  const auto& scales = builtin_scales();
  REQUIRE(scales.size() == 4);
  const LabelScale* acc = find_scale(scales, "acceptability");
  REQUIRE(acc);
  CHECK(acc->bands.size() == 3);
  const LabelScale* grades = find_scale(scales, "grades");
  REQUIRE(grades);
  CHECK(grades->bands.front().label == "F");
  CHECK(grades->bands.back().label == "A+");
  for (std::size_t k = 1; k < grades->bands.size(); ++k) {
    CHECK(grades->bands[k].lower == grades->bands[k - 1].upper);
  }
  const LabelScale* pct = find_scale(scales, "percentiles");
  REQUIRE(pct);
  CHECK(pct->is_percentile());
  const auto span = map_to_labels(make(68, 68, Method::T), *pct);
  CHECK(*span.lower_percentile == Approx(50.0).margin(1e-9));
  for (const auto& s : scales) CHECK_FALSE(s.provenance.empty());
  CHECK(find_scale(scales, "adjectives"));
}

TEST_CASE("map_to_labels", "[decision][scales]") {
  const LabelScale& acc = *find_scale(builtin_scales(), "acceptability");
  SECTION("examples") {
    const auto a = map_to_labels(make(71, 95, Method::T), acc);
    CHECK(a.bands_touched == std::vector<std::string>{"Acceptable"});
    const auto b = map_to_labels(make(45, 72, Method::T), acc);
    CHECK(b.bands_touched.size() == 3);
    CHECK(b.lower_label == "Not Acceptable");
    CHECK(b.upper_label == "Acceptable");
    const auto c = map_to_labels(make(62.5, 62.5, Method::T), acc);
    CHECK(c.bands_touched.size() == 1);
    const auto top = map_to_labels(make(100, 100, Method::T), acc);
    CHECK(top.bands_touched == std::vector<std::string>{"Acceptable"});
  }
  SECTION("violating intervals are clamped and flagged") {
    const auto s = map_to_labels(make(78.6, 102.4, Method::T), acc);
    CHECK(s.clamped);
    CHECK(s.upper_label == "Acceptable");
  }
  SECTION("bands cover the interval and shrinking never adds bands") {
    Rng rng(4);
    for (const auto& scale : builtin_scales()) {
      if (scale.is_percentile()) continue;
      for (int k = 0; k < 300; ++k) {
        double lo = 100 * rng.uniform(), hi = 100 * rng.uniform();
        if (lo > hi) std::swap(lo, hi);
        const auto outer = map_to_labels(make(lo, hi, Method::T), scale);
        // union covers [lo, hi]
        double covered_to = lo;
        for (const auto& b : scale.bands) {
          if (contains(outer.bands_touched, b.label) && b.lower <= covered_to) {
            covered_to = std::max(covered_to, b.upper);
          }
        }
        CHECK(covered_to >= hi);
        const double mid = 0.5 * (lo + hi);
        const auto inner =
            map_to_labels(make(lo + 0.3 * (mid - lo), hi - 0.3 * (hi - mid), Method::T), scale);
        for (const auto& label : inner.bands_touched) CHECK(contains(outer.bands_touched, label));
      }
    }
  }
}

TEST_CASE("scale files are validated", "[decision][scales]") {
  CHECK_THROWS_AS(parse_scales("not json"), ConfigError);
  CHECK_THROWS_AS(parse_scales(R"({"name": "x"})"), ConfigError);
  CHECK_THROWS_AS(
      parse_scales(R"([{"name":"gap","bands":[{"label":"a","lower":0,"upper":40},)"
                   R"({"label":"b","lower":50,"upper":100}]}])"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_scales(R"([{"name":"short","bands":[{"label":"a","lower":0,"upper":90}]}])"),
      ConfigError);
  CHECK_THROWS_AS(parse_scales(R"([{"name":"anch","anchors":[{"score":0,"percentile":10},)"
                               R"({"score":100,"percentile":5}]}])"),
                  ConfigError);
  const auto ok = parse_scales(
      R"([{"name":"two","bands":[{"label":"low","lower":0,"upper":68},)"
      R"({"label":"high","lower":68,"upper":100}],"provenance":"local"}])");
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].bands[1].label == "high");
  CHECK_THROWS_AS(load_scales("/nonexistent/scales.json"), ConfigError);
}
