// Serves the generate/score wire protocol from the mock or oracle backend,
// for exercising the http backend end to end.

#include <spdlog/spdlog.h>

#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "dgrc/http_server.hpp"
#include "dgrc/mock_backend.hpp"
#include "dgrc/oracle_backend.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Wire-protocol server backed by the mock LM", "dgrc-mock-server"};
  std::string host = "127.0.0.1";
  int port = 8089;
  std::uint64_t seed = 0;
  std::string items_path;
  double delta = 0.0;
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Port");
  app.add_option("--seed", seed, "Scoring seed");
  app.add_option("--oracle-items", items_path, "Serve the oracle over these items");
  app.add_option("--oracle-delta", delta, "Oracle bias");
  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<dgrc::Backend> backend;
  try {
    if (items_path.empty()) {
      backend = std::make_unique<dgrc::MockBackend>(dgrc::MockOptions{.seed = seed});
    } else {
      const auto items = dgrc::load_items(items_path);
      dgrc::OracleOptions options;
      options.seed = seed;
      options.delta = delta;
      backend = std::make_unique<dgrc::OracleBackend>(options, items);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  httplib::Server server;
  dgrc::mount_wire_routes(server, *backend);
  spdlog::info("listening on {}:{}", host, port);
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}
