#include "susci/service.hpp"

#include <random>
#include <set>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "susci/embedded_data.hpp"
#include "susci/errors.hpp"
#include "susci/report.hpp"

namespace susci::service {

namespace {

using nlohmann::json;

Response json_response(int status, const json& j) { return {status, report::dump(j)}; }

Response field_error(std::string field, std::string message) {
  const ValidationIssue issue{0, 0, field, message};
  return json_response(400, report::error_json("validation", message, {&issue, 1}));
}

struct BadField {
  std::string field;
  std::string message;
};

template <typename T>
T field_as(const json& body, const char* key) {
  try {
    return body.at(key).get<T>();
  } catch (const json::exception&) {
    throw BadField{key, fmt::format("field '{}' has the wrong type", key)};
  }
}

std::uint64_t random_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace

Response handle_analyze(std::string_view body, const ServiceOptions& options) {
  if (body.size() > options.max_body_bytes) {
    return json_response(
        413, report::error_json("too-large", fmt::format("request body exceeds {} bytes",
                                                         options.max_body_bytes)));
  }
  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception& e) {
    return field_error("body", fmt::format("request body is not valid JSON: {}", e.what()));
  }
  if (!req.is_object()) return field_error("body", "request body must be a JSON object");

  static const std::set<std::string> kKnown = {
      "scores", "responses", "omitted_item", "level", "method", "seed", "bootstrap_samples",
      "prior", "scale", "clamp_to_100", "include_plots"};
  for (const auto& item : req.items()) {
    if (!kKnown.count(item.key())) {
      return field_error(item.key(), fmt::format("unknown field '{}'", item.key()));
    }
  }

  AnalysisOptions opts;
  opts.threads = options.threads;
  opts.bootstrap.threads = options.threads;
  report::ReportOptions ropts;
  std::vector<double> scores;
  try {
    const bool has_scores = req.contains("scores");
    const bool has_responses = req.contains("responses");
    if (has_scores == has_responses) {
      throw BadField{"data", "provide exactly one of 'scores' or 'responses'"};
    }
    ScoreOptions score_opts;
    if (req.contains("clamp_to_100")) score_opts.clamp_to_100 = field_as<bool>(req, "clamp_to_100");
    std::vector<ValidationIssue> issues;
    if (has_scores) {
      if (!req["scores"].is_array()) throw BadField{"scores", "'scores' must be an array"};
      std::size_t row = 0;
      for (const auto& v : req["scores"]) {
        ++row;
        if (!v.is_number()) {
          issues.push_back({row, 1, "score", fmt::format("scores[{}] is not a number", row - 1)});
          continue;
        }
        const double x = v.get<double>();
        if (!(x >= kScoreMin && x <= kScoreMax)) {
          issues.push_back(
              {row, 1, "score", fmt::format("scores[{}] = {} outside 0..100", row - 1, x)});
          continue;
        }
        scores.push_back(x);
      }
    } else {
      if (!req["responses"].is_array()) throw BadField{"responses", "'responses' must be an array"};
      const int omitted = req.contains("omitted_item") ? field_as<int>(req, "omitted_item") : 8;
      std::vector<ResponseSheet> sheets;
      std::size_t row = 0;
      std::optional<std::size_t> width;
      for (const auto& r : req["responses"]) {
        ++row;
        if (!r.is_array() || !std::all_of(r.begin(), r.end(), [](const json& c) {
              return c.is_number_integer();
            })) {
          issues.push_back({row, 0, "row", fmt::format("responses[{}] must be an array of integers",
                                                        row - 1)});
          continue;
        }
        if (!width) width = r.size();
        if (r.size() != *width) {
          issues.push_back({row, 0, "row",
                            fmt::format("row {}: {} cells but earlier rows have {} (mixed 9/10-item "
                                        "rows)",
                                        row, r.size(), *width)});
          continue;
        }
        try {
          auto answers = r.get<std::vector<int>>();
          sheets.push_back(r.size() == 9 ? ResponseSheet::nine_item(std::move(answers), omitted, row)
                                         : ResponseSheet::ten_item(std::move(answers), row));
        } catch (const ValidationError& e) {
          issues.insert(issues.end(), e.issues().begin(), e.issues().end());
        }
      }
      if (issues.empty()) {
        for (const auto& s : score_sheets(sheets, score_opts)) scores.push_back(s.value);
      }
    }
    if (!issues.empty()) {
      return json_response(400, report::error_json("validation", issues.front().message, issues));
    }

    if (req.contains("level")) opts.level = field_as<double>(req, "level");
    if (!(opts.level > 0.0 && opts.level < 1.0)) {
      throw BadField{"level", "level must lie strictly between 0 and 1"};
    }
    if (req.contains("method")) {
      const auto tag = field_as<std::string>(req, "method");
      if (tag != "auto") {
        auto m = parse_method(tag);
        if (!m) throw BadField{"method", fmt::format("unknown method '{}'", tag)};
        opts.method = *m;
      }
    }
    if (req.contains("bootstrap_samples")) {
      const auto b = field_as<std::int64_t>(req, "bootstrap_samples");
      if (b < 1 || static_cast<std::uint64_t>(b) > options.max_bootstrap_samples) {
        throw BadField{"bootstrap_samples",
                       fmt::format("bootstrap_samples must be in 1..{}", options.max_bootstrap_samples)};
      }
      opts.bootstrap.resamples = static_cast<std::size_t>(b);
    }
    if (req.contains("seed")) {
      opts.bootstrap.seed = field_as<std::uint64_t>(req, "seed");
    } else {
      opts.bootstrap.seed = options.seed_source ? options.seed_source() : random_seed();
    }
    if (req.contains("prior")) {
      const json& p = req["prior"];
      if (!p.is_object()) throw BadField{"prior", "'prior' must be an object"};
      for (const auto& item : p.items()) {
        if (item.key() != "mean" && item.key() != "sd" && item.key() != "sigma_upper") {
          throw BadField{"prior." + item.key(), fmt::format("unknown prior field '{}'", item.key())};
        }
      }
      if (p.contains("mean")) opts.prior.mu_prior.mean = field_as<double>(p, "mean");
      if (p.contains("sd")) opts.prior.mu_prior.sd = field_as<double>(p, "sd");
      if (p.contains("sigma_upper")) opts.prior.sigma_upper = field_as<double>(p, "sigma_upper");
      if (!(opts.prior.mu_prior.sd > 0.0)) throw BadField{"prior.sd", "prior sd must be positive"};
      if (!(opts.prior.sigma_upper > 0.0)) {
        throw BadField{"prior.sigma_upper", "sigma_upper must be positive"};
      }
    }
    if (req.contains("scale")) {
      ropts.primary_scale = field_as<std::string>(req, "scale");
      if (!find_scale(builtin_scales(), ropts.primary_scale)) {
        throw BadField{"scale", fmt::format("unknown scale '{}'", ropts.primary_scale)};
      }
    }
    if (req.contains("include_plots")) ropts.include_plots = field_as<bool>(req, "include_plots");
  } catch (const BadField& bad) {
    return field_error(bad.field, bad.message);
  } catch (const ValidationError& e) {
    return json_response(400, report::error_json("validation", e.what(), e.issues()));
  }

  if (scores.empty()) {
    return json_response(422, report::error_json("semantic", "no scores to analyse (n = 0)"));
  }
  try {
    const Study study = study_summary(std::span<const double>(scores));
    const AnalysisResult result = select_interval(study, opts);
    return json_response(200, report::analysis_json(result, ropts));
  } catch (const ValidationError& e) {
    return json_response(422, report::error_json("semantic", e.what(), e.issues()));
  } catch (const DomainError& e) {
    return json_response(422, report::error_json("semantic", e.what()));
  } catch (const ConfigError& e) {
    return json_response(422, report::error_json("config", e.what()));
  }
}

Response handle_scales() {
  json scales = json::array();
  for (const auto& s : builtin_scales()) {
    json bands = json::array();
    for (const auto& b : s.bands) {
      bands.push_back({{"label", b.label}, {"lower", b.lower}, {"upper", b.upper}});
    }
    json anchors = json::array();
    for (const auto& a : s.anchors) {
      anchors.push_back({{"score", a.score}, {"percentile", a.percentile}});
    }
    scales.push_back({{"name", s.name},
                      {"bands", std::move(bands)},
                      {"anchors", std::move(anchors)},
                      {"provenance", s.provenance}});
  }
  return json_response(
      200, {{"schema_version", report::kSchemaVersion}, {"kind", "scales"}, {"scales", scales}});
}

Response handle_schema() { return {200, std::string(embedded::result_schema_json())}; }

Response handle_healthz() { return {200, "ok", "text/plain"}; }

// ---------------------------------------------------------------------------

struct Server::Impl {
  ServerConfig config;
  httplib::Server http;
  int port = 0;
};

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  auto& http = impl_->http;
  const ServiceOptions service = impl_->config.service;

  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  http.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                            {"Access-Control-Allow-Headers", "Content-Type"},
                            {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  // One byte over the cap still reaches the handler, which answers 413.
  http.set_payload_max_length(service.max_body_bytes + 1);
  http.Post("/api/analyze", [send, service](const httplib::Request& req, httplib::Response& res) {
    send(res, handle_analyze(req.body, service));
  });
  http.Get("/api/scales", [send](const httplib::Request&, httplib::Response& res) {
    send(res, handle_scales());
  });
  http.Get("/api/schema", [send](const httplib::Request&, httplib::Response& res) {
    send(res, handle_schema());
  });
  http.Get("/healthz", [send](const httplib::Request&, httplib::Response& res) {
    send(res, handle_healthz());
  });
  http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.status == 413) {
      res.set_content(report::dump(report::error_json("too-large", "request body too large")),
                      "application/json");
    }
  });
  if (impl_->config.static_dir) {
    if (!http.set_mount_point("/", impl_->config.static_dir->string())) {
      throw ConfigError(
          fmt::format("static directory {} does not exist", impl_->config.static_dir->string()));
    }
  }
}

Server::~Server() = default;

int Server::bind() {
  auto& cfg = impl_->config;
  if (cfg.port == 0) {
    impl_->port = impl_->http.bind_to_any_port(cfg.host);
  } else {
    impl_->port = impl_->http.bind_to_port(cfg.host, cfg.port) ? cfg.port : -1;
  }
  if (impl_->port <= 0) {
    throw ConfigError(fmt::format("cannot bind {}:{}", cfg.host, cfg.port));
  }
  return impl_->port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

}  // namespace susci::service
