#include "susci/sus_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "susci/errors.hpp"
#include "susci/stat_kernel.hpp"

namespace susci {
namespace {

void check_answers(const std::vector<int>& answers, std::size_t expected, std::size_t row,
                   int omitted_item) {
  std::vector<ValidationIssue> issues;
  if (answers.size() != expected) {
    issues.push_back({row, 0, "row",
                      fmt::format("row {}: expected {} responses, found {}", row, expected,
                                  answers.size())});
    throw ValidationError(std::move(issues));
  }
  for (std::size_t k = 0; k < answers.size(); ++k) {
    const int item = (omitted_item != 0 && static_cast<int>(k) + 1 >= omitted_item)
                         ? static_cast<int>(k) + 2
                         : static_cast<int>(k) + 1;
    if (answers[k] < 1 || answers[k] > 5) {
      issues.push_back({row, k + 1, fmt::format("Q{}", item),
                        fmt::format("row {}, column Q{}: response {} outside 1..5", row, item,
                                    answers[k])});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

}  // namespace

ResponseSheet ResponseSheet::ten_item(std::vector<int> answers, std::size_t row) {
  check_answers(answers, 10, row, 0);
  return ResponseSheet(std::move(answers), 0);
}

ResponseSheet ResponseSheet::nine_item(std::vector<int> answers, int omitted_item,
                                       std::size_t row) {
  if (omitted_item < 1 || omitted_item > 10) {
    throw ValidationError(fmt::format("omitted item {} outside 1..10", omitted_item),
                          {row, 0, "omitted_item", "omitted item must be in 1..10"});
  }
  check_answers(answers, 9, row, omitted_item);
  return ResponseSheet(std::move(answers), omitted_item);
}

int ResponseSheet::item_number(std::size_t k) const {
  const int item = static_cast<int>(k) + 1;
  return (omitted_item_ != 0 && item >= omitted_item_) ? item + 1 : item;
}

int item_score(int item_index, int response) {
  if (item_index < 1 || item_index > 10) {
    throw ValidationError(fmt::format("item index {} outside 1..10", item_index),
                          {0, static_cast<std::size_t>(std::max(item_index, 0)), "item",
                           "item index outside 1..10"});
  }
  if (response < 1 || response > 5) {
    throw ValidationError(
        fmt::format("column Q{}: response {} outside 1..5", item_index, response),
        {0, static_cast<std::size_t>(item_index), fmt::format("Q{}", item_index),
         fmt::format("response {} outside 1..5", response)});
  }
  return item_index % 2 == 1 ? response - 1 : 5 - response;
}

SusScore sus_score(const ResponseSheet& sheet, ScoreOptions options) {
  int raw = 0;
  for (std::size_t k = 0; k < sheet.answers().size(); ++k) {
    raw += item_score(sheet.item_number(k), sheet.answers()[k]);
  }
  const double multiplier = sheet.is_nine_item() ? kNineItemMultiplier : kTenItemMultiplier;
  double value = multiplier * raw;
  if (options.clamp_to_100) value = std::min(value, kScoreMax);
  return {value};
}

std::vector<SusScore> score_sheets(std::span<const ResponseSheet> sheets, ScoreOptions options) {
  std::vector<SusScore> out;
  out.reserve(sheets.size());
  for (std::size_t i = 0; i < sheets.size(); ++i) {
    if (sheets[i].is_nine_item() != sheets.front().is_nine_item() ||
        sheets[i].omitted_item() != sheets.front().omitted_item()) {
      throw ValidationError(
          fmt::format("row {}: mixed nine- and ten-item sheets in one study", i + 1),
          {i + 1, 0, "variant", "all sheets in a study must use the same item set"});
    }
    out.push_back(sus_score(sheets[i], options));
  }
  return out;
}

Study study_summary(std::span<const double> scores) {
  if (scores.empty()) {
    throw ValidationError("study has no scores", {0, 0, "scores", "at least one score required"});
  }
  Study study;
  study.scores.assign(scores.begin(), scores.end());
  auto& s = study.summary;
  s.n = scores.size();
  double sum = 0.0;
  for (double x : scores) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  s.min = *lo;
  s.max = *hi;
  if (s.n >= 2) {
    double ss = 0.0;
    for (double x : scores) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    if (s.min == s.max) s.sd = 0.0;
  }
  if (s.n >= 3) {
    try {
      s.skewness = stat::sample_skewness(scores);
    } catch (const UndefinedStatistic&) {
      s.skewness.reset();
    }
  }
  return study;
}

Study study_summary(std::span<const SusScore> scores) {
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& s : scores) values.push_back(s.value);
  return study_summary(std::span<const double>(values));
}

FeasibleMeanCounts feasible_mean_counts(std::size_t n) {
  if (n == 0) throw DomainError("feasible_mean_counts needs n >= 1");
  // C(n + 40, 40), accumulated so every intermediate division is exact.
  boost::multiprecision::cpp_int c = 1;
  for (std::size_t k = 1; k <= 40; ++k) {
    c *= n + k;
    c /= k;
  }
  FeasibleMeanCounts out;
  out.combinations = c;
  out.distinct_means = n == 1 ? 41 : 41 * static_cast<std::uint64_t>(n) - (n - 1);
  return out;
}

std::vector<double> enumerate_feasible_means(std::size_t n) {
  if (n < 1 || n > 1000) throw DomainError(fmt::format("n = {} outside 1..1000", n));
  std::vector<double> out(40 * n + 1);
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = 2.5 * static_cast<double>(k) / nd;
  return out;
}

}  // namespace susci
