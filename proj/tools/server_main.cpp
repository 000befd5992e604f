#include <csignal>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "susci/errors.hpp"
#include "susci/parallel.hpp"
#include "susci/service.hpp"

namespace {
susci::service::Server* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HTTP JSON API for SUS analysis", "susci-server"};
  susci::service::ServerConfig cfg;
  if (const char* port = std::getenv("SUSCI_PORT")) cfg.port = std::atoi(port);
  if (const char* host = std::getenv("SUSCI_HOST")) cfg.host = host;
  std::string static_dir;
  if (const char* dir = std::getenv("SUSCI_STATIC_DIR")) static_dir = dir;
  cfg.service.threads = susci::default_thread_count();
  app.add_option("--host", cfg.host);
  app.add_option("--port", cfg.port, "0 picks a free port");
  app.add_option("--static", static_dir, "Directory served at /");
  app.add_option("--max-body", cfg.service.max_body_bytes, "Request size cap in bytes");
  app.add_option("--threads", cfg.service.threads);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (!static_dir.empty()) cfg.static_dir = static_dir;
  try {
    susci::service::Server server(cfg);
    const int port = server.bind();
    std::cout << "listening on http://" << cfg.host << ":" << port << std::endl;
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.listen();
  } catch (const susci::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
