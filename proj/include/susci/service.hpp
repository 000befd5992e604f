#pragma once

// HTTP JSON API. Handlers are pure functions of the request body so they can
// be exercised without a socket; run_server wires them to cpp-httplib.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "susci/decision.hpp"

namespace susci::service {

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct ServiceOptions {
  std::size_t max_body_bytes = 1 << 20;
  std::size_t max_bootstrap_samples = 1000000;
  std::size_t threads = 1;
  // Seed used when a request omits one; defaults to std::random_device.
  std::function<std::uint64_t()> seed_source;
};

// POST /api/analyze. 400 malformed or invalid fields, 413 oversize body,
// 422 semantically invalid (no scores, method undefined for n).
Response handle_analyze(std::string_view body, const ServiceOptions& options = {});
Response handle_scales();
Response handle_schema();
Response handle_healthz();

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
  ServiceOptions service;
};

// Blocks until stop() is called on the returned handle from another thread.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and returns the bound port; throws ConfigError on failure.
  int bind();
  void listen();  // blocking
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace susci::service
