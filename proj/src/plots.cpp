#include "susci/plots.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "susci/errors.hpp"

namespace susci::plots {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 320.0;
constexpr double kLeft = 50.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 40.0;

constexpr const char* kBandColours[] = {"#f4cccc", "#fce5cd", "#fff2cc", "#d9ead3",
                                        "#d0e0e3", "#cfe2f3", "#d9d2e9", "#ead1dc"};

double x_of(double score) { return kLeft + (kWidth - kLeft - kRight) * score / 100.0; }
double y_of(double frac) { return kHeight - kBottom - (kHeight - kTop - kBottom) * frac; }

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string open_svg(std::string_view title) {
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
      kWidth, kHeight, kWidth, kHeight, kLeft, escape(title));
  // x axis with ticks every 10 points
  s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", x_of(0),
                   y_of(0), x_of(100), y_of(0));
  for (int t = 0; t <= 100; t += 10) {
    s += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\" "
        "text-anchor=\"middle\">{}</text>\n",
        x_of(t), y_of(0) + 14, t);
  }
  return s;
}

}  // namespace

std::vector<FrequencyBin> score_frequency(std::span<const double> scores) {
  std::map<double, std::size_t> counts;
  for (double s : scores) ++counts[s];
  std::vector<FrequencyBin> out;
  for (const auto& [score, count] : counts) out.push_back({score, count});
  return out;
}

nlohmann::json score_frequency_json(std::span<const double> scores) {
  nlohmann::json bins = nlohmann::json::array();
  for (const auto& b : score_frequency(scores)) {
    bins.push_back({{"score", b.score}, {"count", b.count}});
  }
  return {{"bins", std::move(bins)}};
}

nlohmann::json interval_bands_json(const AnalysisResult& result, const LabelScale& scale) {
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& b : scale.bands) {
    bands.push_back({{"label", b.label}, {"lower", b.lower}, {"upper", b.upper}});
  }
  nlohmann::json anchors = nlohmann::json::array();
  for (const auto& a : scale.anchors) {
    anchors.push_back({{"score", a.score}, {"percentile", a.percentile}});
  }
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& o : result.intervals) {
    intervals.push_back({{"method", method_tag(o.interval.method)},
                         {"lower", o.interval.lower},
                         {"upper", o.interval.upper},
                         {"recommended", o.recommended},
                         {"selected", o.interval.method == result.selected.method}});
  }
  return {{"scale", scale.name},
          {"bands", std::move(bands)},
          {"anchors", std::move(anchors)},
          {"intervals", std::move(intervals)}};
}

nlohmann::json posterior_json(const AnalysisResult& result) {
  if (!result.posterior) return nullptr;
  const auto& mu = result.posterior->mu_axis;
  const auto& mass = result.posterior->mu_marginal;
  const double step = mu.size() > 1 ? mu[1] - mu[0] : 1.0;
  std::vector<double> density(mass.size());
  std::transform(mass.begin(), mass.end(), density.begin(), [&](double m) { return m / step; });
  return {{"mu", mu}, {"density", std::move(density)}};
}

std::string score_frequency_svg(std::span<const double> scores) {
  const auto bins = score_frequency(scores);
  std::size_t peak = 1;
  for (const auto& b : bins) peak = std::max(peak, b.count);
  std::string s = open_svg("Score frequency");
  const double bar = (x_of(2.5) - x_of(0)) * 0.9;
  for (const auto& b : bins) {
    const double frac = static_cast<double>(b.count) / static_cast<double>(peak);
    const double shown = std::clamp(b.score, 0.0, 100.0);
    s += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#3c78d8\">"
        "<title>{}: {}</title></rect>\n",
        x_of(shown) - bar / 2, y_of(frac), bar, y_of(0) - y_of(frac), b.score, b.count);
  }
  s += fmt::format(
      "<text x=\"12\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\">max {}</text>\n",
      y_of(1.0), peak);
  s += "</svg>\n";
  return s;
}

std::string interval_bands_svg(const AnalysisResult& result, const LabelScale& scale) {
  std::string s = open_svg(fmt::format("Intervals on the {} scale", scale.name));
  const double band_top = y_of(1.0);
  const double band_height = 26.0;
  for (std::size_t k = 0; k < scale.bands.size(); ++k) {
    const Band& b = scale.bands[k];
    s += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\" "
        "stroke=\"#999\"><title>{}</title></rect>\n",
        x_of(b.lower), band_top, x_of(b.upper) - x_of(b.lower), band_height,
        kBandColours[k % std::size(kBandColours)], escape(b.label));
    s += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"9\" "
        "text-anchor=\"middle\">{}</text>\n",
        0.5 * (x_of(b.lower) + x_of(b.upper)), band_top + 16, escape(b.label));
  }
  for (const auto& a : scale.anchors) {
    if (static_cast<int>(a.score) % 10 != 0 || a.score != static_cast<int>(a.score)) continue;
    s += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"9\" "
        "text-anchor=\"middle\">{:.0f}%</text>\n",
        x_of(a.score), band_top + 16, a.percentile);
  }
  double y = band_top + band_height + 24;
  for (const auto& o : result.intervals) {
    const bool selected = o.interval.method == result.selected.method;
    const double lo = std::clamp(o.interval.lower, 0.0, 100.0);
    const double hi = std::clamp(o.interval.upper, 0.0, 100.0);
    const char* colour = selected ? "#cc0000" : (o.recommended ? "#1155cc" : "#999999");
    s += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
        "stroke-width=\"{}\"/>\n",
        x_of(lo), y, x_of(hi), y, colour, selected ? 4 : 2);
    s += fmt::format(
        "<text x=\"4\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\n",
        y + 3, method_tag(o.interval.method));
    y += 22;
  }
  s += "</svg>\n";
  return s;
}

std::string posterior_svg(const AnalysisResult& result) {
  std::string s = open_svg("Posterior of the mean SUS score");
  if (result.posterior) {
    const auto& mu = result.posterior->mu_axis;
    const auto& mass = result.posterior->mu_marginal;
    const double peak = *std::max_element(mass.begin(), mass.end());
    std::string points;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      points += fmt::format("{:.2f},{:.2f} ", x_of(mu[i]), y_of(peak > 0 ? mass[i] / peak : 0));
    }
    s += fmt::format("<polyline fill=\"none\" stroke=\"#1155cc\" stroke-width=\"2\" points=\"{}\"/>\n",
                     points);
  }
  s += "</svg>\n";
  return s;
}

std::vector<std::filesystem::path> write_plots(const AnalysisResult& result,
                                               const LabelScale& scale,
                                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& body) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
    out << body;
    written.push_back(path);
  };
  put("score_frequency.json", score_frequency_json(result.study.scores).dump(2) + "\n");
  put("score_frequency.svg", score_frequency_svg(result.study.scores));
  put("interval_bands.json", interval_bands_json(result, scale).dump(2) + "\n");
  put("interval_bands.svg", interval_bands_svg(result, scale));
  put("posterior.json", posterior_json(result).dump(2) + "\n");
  put("posterior.svg", posterior_svg(result));
  return written;
}

}  // namespace susci::plots
