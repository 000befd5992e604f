#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "susci/csv_ingest.hpp"
#include "susci/decision.hpp"
#include "susci/errors.hpp"
#include "susci/plots.hpp"
#include "susci/report.hpp"
#include "susci/simulation.hpp"

namespace susci::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AnalyzeArgs {
  std::string file;
  double level = 0.95;
  std::string method = "auto";
  std::string scale = "acceptability";
  std::size_t bootstrap_samples = 10000;
  std::uint64_t seed = kDefaultSeed;
  double prior_mean = 70.0;
  double prior_sd = 12.0;
  double sigma_upper = 30.0;
  std::string plot_dir;
  std::string columns;
  bool pre_scored = false;
  int omitted_item = 8;
  bool clamp = false;
  std::size_t threads = 1;
  std::string scales_file;
};

// Defaults from the JSON file named by SUSCI_CONFIG; flags override.
void apply_env_config(AnalyzeArgs& a) {
  const char* path = std::getenv("SUSCI_CONFIG");
  if (!path || !*path) return;
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("SUSCI_CONFIG: cannot open {}", path));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    for (const auto& item : j.items()) {
      const auto& k = item.key();
      const auto& v = item.value();
      if (k == "level") a.level = v.get<double>();
      else if (k == "method") a.method = v.get<std::string>();
      else if (k == "scale") a.scale = v.get<std::string>();
      else if (k == "bootstrap_samples") a.bootstrap_samples = v.get<std::size_t>();
      else if (k == "seed") a.seed = v.get<std::uint64_t>();
      else if (k == "prior_mean") a.prior_mean = v.get<double>();
      else if (k == "prior_sd") a.prior_sd = v.get<double>();
      else if (k == "sigma_upper") a.sigma_upper = v.get<double>();
      else if (k == "threads") a.threads = v.get<std::size_t>();
      else if (k == "scales_file") a.scales_file = v.get<std::string>();
      else throw ConfigError(fmt::format("SUSCI_CONFIG: unknown key '{}'", k));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("SUSCI_CONFIG: {}", e.what()));
  }
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt::format("{:.2f}", *v) : std::string("n/a");
}

void print_analysis_text(std::ostream& out, const AnalysisResult& r) {
  const auto& s = r.study.summary;
  out << fmt::format("n = {}, mean = {:.2f}, sd = {}, skewness = {}, range = [{}, {}]\n", s.n,
                     s.mean, fmt_opt(s.sd), fmt_opt(s.skewness), s.min, s.max);
  out << fmt::format("rule: {}: {}\n", rule_tag(r.plan.rule_fired), r.plan.rationale);
  std::string rec;
  for (Method m : r.plan.recommended) rec += (rec.empty() ? "" : ", ") + std::string(method_tag(m));
  out << "recommended: " << rec << "\n";
  if (r.plan.caveat) out << "caveat: " << *r.plan.caveat << "\n";
  out << fmt::format("\n{:<14}{:>10}{:>10}{:>9}  notes\n", "method", "lower", "upper", "width");
  for (const auto& o : r.intervals) {
    const auto& iv = o.interval;
    std::string notes;
    if (iv.diagnostics.violates_lower) notes += "below 0; ";
    if (iv.diagnostics.violates_upper) notes += "above 100; ";
    notes += o.recommended ? "recommended" : "not recommended";
    out << fmt::format("{:<14}{:>10.2f}{:>10.2f}{:>9.2f}  {}\n", method_tag(iv.method), iv.lower,
                       iv.upper, iv.diagnostics.width, notes);
  }
  out << fmt::format("\nselected: {} ({:.2f}, {:.2f}) at {:g}%\n", method_tag(r.selected.method),
                     r.selected.lower, r.selected.upper, 100.0 * r.selected.level);
  for (const auto& w : r.selected.warnings) out << "  note: " << w.message << "\n";
  out << "labels:\n";
  for (const auto& l : r.labels) {
    out << fmt::format("  {:<14} {} .. {}{}\n", l.scale, l.lower_label, l.upper_label,
                       l.clamped ? " (clamped to 0..100)" : "");
  }
  if (!r.warnings.empty()) {
    out << "warnings:\n";
    for (const auto& w : r.warnings) out << "  [" << w.code << "] " << w.message << "\n";
  }
  out << "seed: " << r.seed << "\n";
}

InputFile read_input(const std::string& file, bool pre_scored, const std::string& columns,
                     int omitted_item) {
  IngestOptions opts;
  opts.mode = pre_scored ? InputMode::PreScored : InputMode::RawResponses;
  opts.columns = split_columns_flag(columns);
  opts.omitted_item = omitted_item;
  return ingest_csv(file, opts);
}

int do_analyze(const AnalyzeArgs& a, bool json, std::ostream& out) {
  std::vector<LabelScale> scales =
      a.scales_file.empty() ? builtin_scales() : load_scales(a.scales_file);
  if (!find_scale(scales, a.scale)) {
    throw UsageError(fmt::format("unknown scale '{}'", a.scale));
  }
  AnalysisOptions opts;
  opts.level = a.level;
  if (a.method != "auto") {
    auto m = parse_method(a.method);
    if (!m) throw UsageError(fmt::format("unknown method '{}'", a.method));
    opts.method = *m;
  }
  opts.bootstrap.resamples = a.bootstrap_samples;
  opts.bootstrap.seed = a.seed;
  opts.bootstrap.threads = a.threads;
  opts.threads = a.threads;
  opts.prior.mu_prior.mean = a.prior_mean;
  opts.prior.mu_prior.sd = a.prior_sd;
  opts.prior.sigma_upper = a.sigma_upper;
  if (!(a.prior_sd > 0.0) || !(a.sigma_upper > 0.0)) {
    throw UsageError("--prior-sd and --sigma-upper must be positive");
  }
  const InputFile input = read_input(a.file, a.pre_scored, a.columns, a.omitted_item);
  const auto scores = input_scores(input, {a.clamp});
  const Study study = study_summary(std::span<const double>(scores));
  const AnalysisResult result = select_interval(study, opts, scales);
  if (!a.plot_dir.empty()) plots::write_plots(result, *find_scale(scales, a.scale), a.plot_dir);
  if (json) {
    report::ReportOptions ropts;
    ropts.primary_scale = a.scale;
    out << report::dump(report::analysis_json(result, ropts));
  } else {
    print_analysis_text(out, result);
  }
  return 0;
}

int do_score(const std::string& file, bool pre_scored, const std::string& columns, int omitted,
             bool clamp, bool json, std::ostream& out) {
  const InputFile input = read_input(file, pre_scored, columns, omitted);
  const auto scores = input_scores(input, {clamp});
  if (json) {
    out << report::dump(report::scores_json(scores));
    return 0;
  }
  for (std::size_t k = 0; k < scores.size(); ++k) {
    out << fmt::format("row {}: {}\n", k + 1, scores[k]);
  }
  const Study s = study_summary(std::span<const double>(scores));
  out << fmt::format("n = {}, mean = {}\n", s.summary.n, s.summary.mean);
  return 0;
}

int do_enumerate(std::size_t n, bool list, bool json, std::ostream& out) {
  if (n < 1 || n > 1000) throw UsageError("--n must be in 1..1000");
  if (json) {
    out << report::dump(report::enumeration_json(n));
    return 0;
  }
  const auto counts = feasible_mean_counts(n);
  out << fmt::format("n={} combinations={} distinct_means={}\n", n, counts.combinations.str(),
                     counts.distinct_means);
  if (list) {
    for (double m : enumerate_feasible_means(n)) out << m << "\n";
  }
  return 0;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError(fmt::format("cannot write {}", path.string()));
  f << body;
}

// Outputs are named after the experiment, with a 1-based suffix for array entries.
void run_one_experiment(const nlohmann::json& spec, const std::string& out_dir,
                        std::size_t threads, std::ostream& out, std::size_t index = 0) {
  const std::string experiment = spec.value("experiment", std::string("coverage"));
  const std::string stem = index == 0 ? experiment : fmt::format("{}-{}", experiment, index);
  sim::SimConfig cfg = experiment == "upper-bound" ? sim::upper_bound_defaults() : sim::SimConfig{};
  nlohmann::json merged = sim::to_json(cfg);
  for (const auto& item : spec.items()) merged[item.key()] = item.value();
  cfg = sim::sim_config_from_json(merged);
  if (threads > 0) cfg.threads = threads;
  const std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
  std::filesystem::create_directories(dir);

  nlohmann::json summary;
  sim::ExperimentResult const* grid = nullptr;
  sim::Rule3Summary r3;
  sim::UpperBoundSummary ub;
  sim::ExperimentResult cov;
  if (experiment == "sample-mean") {
    const std::size_t n = spec.value("n", std::size_t{5});
    const double skew = spec.value("skew", -0.4);
    const auto r = sim::sample_mean_distribution(cfg, n, skew, spec.value("bins", std::size_t{60}));
    summary = sim::to_json(r);
    summary["config"] = sim::to_json(cfg);
    out << fmt::format("sample-mean: skewness of means {:.4f}; parent mean {:.2f}, sd {:.2f}, "
                       "skewness {:.3f}\n",
                       r.skewness_of_means, r.parent_mean, r.parent_sd, r.parent_skewness);
  } else if (experiment == "coverage") {
    cov = sim::run_coverage_experiment(cfg);
    grid = &cov;
    summary = sim::to_json(cov);
    out << fmt::format("coverage: {} cells\n", cov.cells.size());
  } else if (experiment == "rule3") {
    r3 = sim::run_rule3_validation(cfg);
    grid = &r3.grid;
    summary = sim::to_json(r3);
    out << fmt::format("rule3: coverage min {:.3f} max {:.3f} mean {:.4f}\n", r3.min_coverage,
                       r3.max_coverage, r3.mean_coverage);
  } else if (experiment == "upper-bound") {
    ub = sim::run_upper_bound_experiment(cfg);
    grid = &ub.grid;
    summary = sim::to_json(ub);
    out << fmt::format("upper-bound: t {:.3f}, expanded-bca {:.3f}, bca fewer errors in {:.3f} "
                       "of cells\n",
                       ub.t_contains_70, ub.bca_contains_70, ub.bca_fewer_errors_fraction);
  } else {
    throw ConfigError(fmt::format("unknown experiment '{}'", experiment));
  }
  write_file(dir / (stem + ".json"), summary.dump(2) + "\n");
  if (grid) {
    std::ostringstream csv;
    sim::write_cells_csv(csv, *grid);
    write_file(dir / (stem + ".csv"), csv.str());
    for (const auto& note : grid->notes) out << "  note: " << note << "\n";
  }
}

int do_simulate(const std::string& config_path, const std::string& out_dir, std::size_t threads,
                std::ostream& out) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError(fmt::format("cannot open {}", config_path));
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", config_path, e.what()));
  }
  if (doc.is_array()) {
    for (std::size_t k = 0; k < doc.size(); ++k) run_one_experiment(doc[k], out_dir, threads, out, k + 1);
  } else {
    run_one_experiment(doc, out_dir, threads, out);
  }
  return 0;
}

bool wants_json(int argc, const char* const* argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string_view(argv[i]) == "--format" && std::string_view(argv[i + 1]) == "json") {
      return true;
    }
  }
  for (int i = 1; i < argc; ++i) {
    if (std::string_view(argv[i]) == "--format=json") return true;
  }
  return false;
}

int fail(bool json, std::ostream& out, std::ostream& err, int code, std::string_view kind,
         std::string_view message, std::span<const ValidationIssue> issues = {}) {
  if (json) {
    out << report::dump(report::error_json(kind, message, issues));
  } else {
    err << "error: " << message << "\n";
    for (const auto& issue : issues) {
      if (issue.message != message) err << "  " << issue.message << "\n";
    }
  }
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SUS study scores with small-sample intervals", "susci"};
  app.require_subcommand(1);
  std::string format = "text";

  AnalyzeArgs a;
  bool env_error = false;
  std::string env_message;
  try {
    apply_env_config(a);
  } catch (const ConfigError& e) {
    env_error = true;
    env_message = e.what();
  }

  auto* analyze = app.add_subcommand("analyze", "Score a CSV file and report intervals");
  analyze->add_option("file", a.file, "CSV of responses (Q1..Q10) or scores")->required();
  analyze->add_option("--level", a.level, "Confidence or credible level")
      ->check(CLI::Validator(
          [](const std::string& v) {
            double x = 0.0;
            try {
              x = std::stod(v);
            } catch (const std::exception&) {
              return std::string("level must be a number");
            }
            return x > 0.0 && x < 1.0 ? std::string() : std::string("level must lie in (0, 1)");
          },
          "(0,1)"));
  analyze->add_option("--method", a.method,
                      "auto|z|t|adjusted-t|percentile|bca|expanded-bca|bayes");
  analyze->add_option("--scale", a.scale, "Label scale for plots and the primary label");
  analyze->add_option("--scales", a.scales_file, "Scale file overriding the shipped scales");
  analyze->add_option("--bootstrap-samples", a.bootstrap_samples)->check(CLI::PositiveNumber);
  analyze->add_option("--seed", a.seed);
  analyze->add_option("--prior-mean", a.prior_mean);
  analyze->add_option("--prior-sd", a.prior_sd);
  analyze->add_option("--sigma-upper", a.sigma_upper);
  analyze->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
  analyze->add_option("--plot", a.plot_dir, "Write plot JSON and SVG into DIR");
  analyze->add_option("--columns", a.columns, "File columns for Q1..Q10 (indices or names)");
  analyze->add_flag("--pre-scored", a.pre_scored, "File holds one SUS score per row");
  analyze->add_option("--omitted-item", a.omitted_item, "Item missing from nine-item files")
      ->check(CLI::Range(1, 10));
  analyze->add_flag("--clamp", a.clamp, "Clamp nine-item scores to 100");
  analyze->add_option("--threads", a.threads)->check(CLI::PositiveNumber);

  std::string score_file, score_columns;
  bool score_pre = false, score_clamp = false;
  int score_omitted = 8;
  auto* score = app.add_subcommand("score", "Score each row of a CSV file");
  score->add_option("file", score_file)->required();
  score->add_option("--columns", score_columns);
  score->add_flag("--pre-scored", score_pre);
  score->add_option("--omitted-item", score_omitted)->check(CLI::Range(1, 10));
  score->add_flag("--clamp", score_clamp);
  score->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  std::size_t enum_n = 0;
  bool enum_list = false;
  auto* enumerate = app.add_subcommand("enumerate", "Count feasible study means");
  enumerate->add_option("--n", enum_n, "Number of respondents")->required();
  enumerate->add_flag("--list", enum_list, "Also print every feasible mean");
  enumerate->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  std::string sim_config, sim_out;
  std::size_t sim_threads = 0;
  auto* simulate = app.add_subcommand("simulate", "Run simulation experiments from a JSON config");
  simulate->add_option("config", sim_config)->required();
  simulate->add_option("--out", sim_out, "Output directory for CSV and JSON");
  simulate->add_option("--threads", sim_threads);

  const bool json = wants_json(argc, argv);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail(json, out, err, 2, "usage", e.what());
  }

  try {
    if (env_error && analyze->parsed()) throw ConfigError(env_message);
    if (analyze->parsed()) return do_analyze(a, json, out);
    if (score->parsed()) {
      return do_score(score_file, score_pre, score_columns, score_omitted, score_clamp, json, out);
    }
    if (enumerate->parsed()) return do_enumerate(enum_n, enum_list, json, out);
    if (simulate->parsed()) return do_simulate(sim_config, sim_out, sim_threads, out);
  } catch (const UsageError& e) {
    return fail(json, out, err, 2, "usage", e.what());
  } catch (const ValidationError& e) {
    return fail(json, out, err, 1, "validation", e.what(), e.issues());
  } catch (const ConfigError& e) {
    return fail(json, out, err, 1, "config", e.what());
  } catch (const DomainError& e) {
    return fail(json, out, err, 1, "semantic", e.what());
  } catch (const UndefinedStatistic& e) {
    return fail(json, out, err, 1, "semantic", e.what());
  }
  return 2;
}

}  // namespace susci::cli
