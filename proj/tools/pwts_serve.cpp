#include <csignal>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pwts/service.hpp"

namespace {
pwts::Service* g_service = nullptr;
void on_signal(int) {
  if (g_service) g_service->server().stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HTTP front end for the pwts engine", "pwts_serve"};
  std::optional<std::string> listen;
  pwts::ServiceOptions options;
  app.add_option("--listen", listen, "host:port (default 127.0.0.1:8080, or $PWTS_LISTEN)");
  app.add_option("--static", options.static_dir, "Serve the built UI bundle from this directory");
  app.add_option("--max-jobs-per-token", options.max_active_per_token,
                 "Active jobs allowed per X-Client-Token (0: unlimited)");
  app.add_option("--threads", options.threads, "Grid worker threads (0: all cores)");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto addr = pwts::resolve_listen(listen);
    pwts::Service service(options);
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const int port = service.start(addr);
    std::cerr << "listening on " << addr.host << ':' << port << '\n';
    service.wait();
    g_service = nullptr;
  } catch (const std::exception& e) {
    std::cerr << "pwts_serve: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
