// SPDX-License-Identifier: Apache-2.0
// streamstyle-serve: HTTP render service for the studio UI.
#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>

#include "streamstyle/parallel.hpp"
#include "streamstyle/service.hpp"

namespace {
streamstyle::service::HttpServer* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streamline render service"};
  const char* env_addr = std::getenv("SS_ADDR");
  const char* env_port = std::getenv("SS_PORT");
  std::string addr = env_addr ? env_addr : "127.0.0.1";
  int port = env_port ? std::atoi(env_port) : 8080;
  int threads = 0;
  app.add_option("--addr", addr, "Bind address (env SS_ADDR)");
  app.add_option("--port", port, "Bind port, 0 = any (env SS_PORT)")->check(CLI::Range(0, 65535));
  app.add_option("--threads", threads, "Render threads, 0 = all cores");
  CLI11_PARSE(app, argc, argv);

  streamstyle::service::ServiceOptions opts;
  opts.render_threads = streamstyle::resolve_threads(threads);
  streamstyle::service::Service service(opts);
  streamstyle::service::HttpServer server(service);
  if (!server.bind(addr, port)) {
    std::cerr << "error: cannot bind " << addr << ':' << port << '\n';
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << addr << ':' << server.port() << '\n';
  server.listen();
  return 0;
}
