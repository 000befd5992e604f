#include <catch2/catch_amalgamated.hpp>

#include <future>
#include <thread>

#include <httplib.h>

#include "fixtures.hpp"
#include "json_schema.hpp"
#include "susci/report.hpp"
#include "susci/service.hpp"

using namespace susci;
using nlohmann::json;

namespace {

json body_of(const service::Response& r) { return json::parse(r.body); }

void require_valid(const json& doc) {
  const auto errors = susci::testing::result_schema().validate(doc);
  for (const auto& e : errors) UNSCOPED_INFO(e);
  CHECK(errors.empty());
}

const char* kWorked = R"({"scores": [97.5, 97.5, 97.5, 80, 80], "method": "expanded-bca",
                          "bootstrap_samples": 100000, "seed": 3})";

}  // namespace

TEST_CASE("analyze worked example", "[service]") {
  const auto r = service::handle_analyze(kWorked);
  REQUIRE(r.status == 200);
  const auto doc = body_of(r);
  require_valid(doc);
  CHECK(doc["selected"]["method"] == "expanded-bca");
  CHECK(doc["selected"]["lower"] == 80.0);
  CHECK(doc["selected"]["upper"] == 97.5);
  CHECK(doc["seed"] == 3);
  CHECK(doc["plan"]["rule_fired"] == "Rule1_nLE5");
}

TEST_CASE("analyze status codes", "[service]") {
  CHECK(service::handle_analyze(R"({"scores": []})").status == 422);
  CHECK(service::handle_analyze("{not json").status == 400);
  CHECK(service::handle_analyze(R"({"scores": [50], "level": 2})").status == 400);
  CHECK(service::handle_analyze(R"({"scores": [50], "method": "magic"})").status == 400);
  CHECK(service::handle_analyze(R"({"scores": [120]})").status == 400);
  CHECK(service::handle_analyze(R"({"scores": [50], "colour": 1})").status == 400);
  CHECK(service::handle_analyze(R"({"scores": [50], "method": "t"})").status == 422);
  CHECK(service::handle_analyze(R"({"responses": [[3,3,3,3,3,3,3,3,3,6]]})").status == 400);
  service::ServiceOptions small;
  small.max_body_bytes = 16;
  CHECK(service::handle_analyze(R"({"scores": [50, 60, 70]})", small).status == 413);

  const auto bad = service::handle_analyze(R"({"responses": [[3,3,3,3,3,3,3,3,3,3],[3,6,3,3,3,3,3,3,3,3]]})");
  const auto doc = body_of(bad);
  require_valid(doc);
  CHECK(doc["error"]["issues"][0]["row"] == 2);
  CHECK(doc["error"]["issues"][0]["field"] == "Q2");
  require_valid(body_of(service::handle_analyze(R"({"scores": []})")));
}

TEST_CASE("rule dispatch and raw responses", "[service]") {
  const auto r = service::handle_analyze(
      R"({"responses": [[4,2,4,1,5,2,4,2,4,3],[5,1,4,2,4,1,5,1,5,2],[3,3,3,2,4,3,3,2,3,3],
                        [4,2,5,1,4,2,4,1,4,2],[2,4,2,3,3,4,2,4,2,4],[5,1,5,1,5,1,5,2,4,1],
                        [4,2,4,2,4,2,4,2,4,2]], "seed": 1, "bootstrap_samples": 2000})");
  REQUIRE(r.status == 200);
  const auto doc = body_of(r);
  CHECK(doc["plan"]["rule_fired"] == "Rule2_n6to8");
  CHECK(doc["selected"]["method"] == "expanded-bca");
  CHECK(doc["study"]["n"] == 7);
}

TEST_CASE("seeds are generated and echoed", "[service]") {
  service::ServiceOptions opts;
  opts.seed_source = [] { return std::uint64_t{987654321}; };
  const auto doc = body_of(service::handle_analyze(R"({"scores": [60, 70, 80]})", opts));
  CHECK(doc["seed"] == 987654321u);
}

TEST_CASE("identical requests give byte-identical bodies, also concurrently", "[service]") {
  const std::string req = R"({"scores": [55, 72.5, 90, 67.5, 80, 85, 77.5, 62.5, 95], "seed": 9,
                               "bootstrap_samples": 4000})";
  const auto first = service::handle_analyze(req).body;
  std::vector<std::future<std::string>> futures;
  for (int k = 0; k < 4; ++k) {
    futures.push_back(std::async(std::launch::async, [&] { return service::handle_analyze(req).body; }));
  }
  for (auto& f : futures) CHECK(f.get() == first);
}

TEST_CASE("meta endpoints", "[service]") {
  CHECK(service::handle_healthz().body == "ok");
  const auto scales = body_of(service::handle_scales());
  require_valid(scales);
  CHECK(scales["scales"].size() == 4);
  const auto schema = body_of(service::handle_schema());
  CHECK(schema["schema_version"] == body_of(service::handle_analyze(kWorked))["schema_version"]);
}

TEST_CASE("HTTP server round trip", "[service][http]") {
  service::ServerConfig cfg;
  cfg.port = 0;
  service::Server server(cfg);
  const int port = server.bind();
  std::thread worker([&] { server.listen(); });
  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);

  auto health = client.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->body == "ok");
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

  auto res = client.Post("/api/analyze", kWorked, "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == service::handle_analyze(kWorked).body);

  auto schema = client.Get("/api/schema");
  REQUIRE(schema);
  CHECK(json::parse(schema->body)["schema_version"] == "1.0.0");

  const std::string huge = R"({"scores": [)" + std::string(1 << 20, ' ') + "50]}";
  auto big = client.Post("/api/analyze", huge, "application/json");
  REQUIRE(big);
  CHECK(big->status == 413);

  server.stop();
  worker.join();
}
