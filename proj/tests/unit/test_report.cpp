#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "fixtures.hpp"
#include "json_schema.hpp"
#include "susci/embedded_data.hpp"
#include "susci/plots.hpp"
#include "susci/report.hpp"
#include "susci/simulation.hpp"

using namespace susci;

namespace {

void require_valid(const nlohmann::json& doc) {
  const auto errors = susci::testing::result_schema().validate(doc);
  for (const auto& e : errors) UNSCOPED_INFO(e);
  CHECK(errors.empty());
}

AnalysisOptions fast_options() {
  AnalysisOptions o;
  o.bootstrap = {2000, 5, false, 1};
  o.grid = {401, 200};
  return o;
}

}  // namespace

TEST_CASE("schema self-checks", "[report][schema]") {
  const auto schema = nlohmann::json::parse(embedded::result_schema_json());
  CHECK(schema.at("schema_version") == report::kSchemaVersion);
  const auto& v = susci::testing::result_schema();
  CHECK_FALSE(v.validate(nlohmann::json::object()).empty());
  CHECK_FALSE(v.validate(R"({"schema_version":"1.0.0","kind":"enumeration","n":0,)"
                         R"("combinations":"1","distinct_means":1})"_json)
                  .empty());
}

TEST_CASE("analysis JSON conforms to the schema", "[report][schema]") {
  for (const auto& xs : {susci::testing::kWorkedExample, std::vector<double>{72.5},
                         std::vector<double>{60, 62.5}, std::vector<double>{50, 50, 50},
                         std::vector<double>{100, 100, 97.5, 100, 100, 77.5, 100, 100, 95}}) {
    const auto r = select_interval(study_summary(xs), fast_options());
    const auto doc = report::analysis_json(r);
    require_valid(doc);
    CHECK(doc["schema_version"] == "1.0.0");
    CHECK(doc["labels"].size() == 4);
  }
  const auto no_plots =
      report::analysis_json(select_interval(study_summary(susci::testing::kWorkedExample),
                                            fast_options()),
                            {"grades", false});
  require_valid(no_plots);
  CHECK(no_plots["plots"].is_null());
}

TEST_CASE("other documents conform to the schema", "[report][schema]") {
  require_valid(report::enumeration_json(10));
  CHECK(report::enumeration_json(10)["combinations"] == "10272278170");
  require_valid(report::scores_json(susci::testing::kWorkedExample));
  require_valid(report::scores_json({}));
  const ValidationIssue issue{3, 2, "Q2", "row 3, column Q2: response 6 outside 1..5"};
  require_valid(report::error_json("validation", issue.message, {&issue, 1}));
  require_valid(report::error_json("semantic", "no scores"));
}

TEST_CASE("synthetic 206-study batch through the report pipeline", "[report][schema][batch]") {
  const auto batch = sim::synthetic_study_batch(2026);
  REQUIRE(batch.size() == 206);
  std::size_t rule_counts[3] = {0, 0, 0};
  std::size_t covered = 0;
  for (const auto& s : batch) {
    auto o = fast_options();
    const auto r = select_interval(study_summary(s.scores), o);
    ++rule_counts[static_cast<int>(r.plan.rule_fired)];
    covered += r.selected.lower <= s.true_mean && s.true_mean <= r.selected.upper;
    const auto doc = report::analysis_json(r);
    const auto errors = susci::testing::result_schema().validate(doc);
    REQUIRE(errors.empty());
    if (r.plan.rule_fired == Rule::Rule3_nGE9) {
      CHECK_FALSE((r.selected.diagnostics.violates_upper || r.selected.diagnostics.violates_lower));
    }
  }
  CHECK(rule_counts[0] > 0);
  CHECK(rule_counts[1] > 0);
  CHECK(rule_counts[2] > 0);
  // Loose sanity bound on realised coverage across heterogeneous studies.
  CHECK(static_cast<double>(covered) / batch.size() > 0.8);
}

TEST_CASE("plot export", "[report][plots]") {
  const auto r = select_interval(study_summary(susci::testing::kWorkedExample), fast_options());
  const auto freq = plots::score_frequency(r.study.scores);
  REQUIRE(freq.size() == 2);
  CHECK(freq[0].score == 80.0);
  CHECK(freq[0].count == 2);
  CHECK(freq[1].count == 3);
  const auto post = plots::posterior_json(r);
  double area = 0;
  for (std::size_t i = 0; i < post["density"].size(); ++i) {
    area += post["density"][i].get<double>() * 0.25;  // 401-node grid step
  }
  CHECK(area == Catch::Approx(1.0).epsilon(1e-9));
  const auto svg = plots::interval_bands_svg(r, *find_scale(builtin_scales(), "acceptability"));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("Not Acceptable") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "susci_plot_test";
  std::filesystem::remove_all(dir);
  const auto files = plots::write_plots(r, *find_scale(builtin_scales(), "grades"), dir);
  CHECK(files.size() == 6);
  for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 0);
  std::filesystem::remove_all(dir);
}
