#pragma once

// Plot-ready series and SVG rendering for score frequencies, intervals over
// a label scale, and the Bayes posterior of the mean.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "susci/decision.hpp"

namespace susci::plots {

struct FrequencyBin {
  double score = 0.0;
  std::size_t count = 0;
};

// One bin per distinct score, ascending.
std::vector<FrequencyBin> score_frequency(std::span<const double> scores);

nlohmann::json score_frequency_json(std::span<const double> scores);
// Scale bands plus every computed interval, selected one flagged.
nlohmann::json interval_bands_json(const AnalysisResult& result, const LabelScale& scale);
// Density of mu (mass / grid step); null when no posterior was computed.
nlohmann::json posterior_json(const AnalysisResult& result);

std::string score_frequency_svg(std::span<const double> scores);
std::string interval_bands_svg(const AnalysisResult& result, const LabelScale& scale);
std::string posterior_svg(const AnalysisResult& result);

// Writes score_frequency, interval_bands and posterior as .json and .svg
// into dir (created if missing). Returns the files written.
std::vector<std::filesystem::path> write_plots(const AnalysisResult& result,
                                               const LabelScale& scale,
                                               const std::filesystem::path& dir);

}  // namespace susci::plots
