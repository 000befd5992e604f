#pragma once

// SUS questionnaire scoring and study aggregation.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace susci {

inline constexpr double kTenItemMultiplier = 2.5;
inline constexpr double kNineItemMultiplier = 2.78;
inline constexpr double kScoreMin = 0.0;
inline constexpr double kScoreMax = 100.0;

struct TenItem {};
struct NineItem {
  int omitted_item = 0;  // 1..10
};

class ResponseSheet {
 public:
  // Throws ValidationError unless the answer count matches the variant and
  // every answer is in 1..5. `row` labels issues (1-based, 0 = unknown).
  static ResponseSheet ten_item(std::vector<int> answers, std::size_t row = 0);
  static ResponseSheet nine_item(std::vector<int> answers, int omitted_item, std::size_t row = 0);

  const std::vector<int>& answers() const noexcept { return answers_; }
  bool is_nine_item() const noexcept { return omitted_item_ != 0; }
  int omitted_item() const noexcept { return omitted_item_; }
  // Original questionnaire item number (1..10) for answers()[k].
  int item_number(std::size_t k) const;

 private:
  ResponseSheet(std::vector<int> answers, int omitted_item)
      : answers_(std::move(answers)), omitted_item_(omitted_item) {}

  std::vector<int> answers_;
  int omitted_item_ = 0;
};

struct SusScore {
  double value = 0.0;
};

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;        // n - 1 denominator; absent for n == 1
  std::optional<double> skewness;  // G1; absent for n < 3 or zero variance
  double min = 0.0;
  double max = 0.0;
};

struct Study {
  std::vector<double> scores;
  SummaryStats summary;
};

struct ScoreOptions {
  bool clamp_to_100 = false;  // nine-item scores can reach 100.08
};

// Odd items contribute response - 1, even items 5 - response.
int item_score(int item_index, int response);
SusScore sus_score(const ResponseSheet& sheet, ScoreOptions options = {});
// Rejects mixed nine/ten-item sheets.
std::vector<SusScore> score_sheets(std::span<const ResponseSheet> sheets, ScoreOptions options = {});

Study study_summary(std::span<const double> scores);
Study study_summary(std::span<const SusScore> scores);

struct FeasibleMeanCounts {
  boost::multiprecision::cpp_int combinations;  // multisets of n scores
  std::uint64_t distinct_means = 0;
};

FeasibleMeanCounts feasible_mean_counts(std::size_t n);
// { 2.5 k / n : k = 0..40n }, ascending. 1 <= n <= 1000.
std::vector<double> enumerate_feasible_means(std::size_t n);

}  // namespace susci
