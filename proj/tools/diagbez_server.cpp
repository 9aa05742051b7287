// HTTP design service. Address and port come from --host/--port or the
// DIAGBEZ_HOST/DIAGBEZ_PORT environment variables.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "diagbez/service.hpp"

namespace {

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diagbez design service", "diagbez_server"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string snapshot;
  if (const char* h = std::getenv("DIAGBEZ_HOST")) host = h;
  if (const char* p = std::getenv("DIAGBEZ_PORT")) port = std::atoi(p);
  app.add_option("--host", host, "bind address");
  app.add_option("--port", port, "bind port")->check(CLI::Range(0, 65535));
  app.add_option("--snapshot", snapshot, "session snapshot file, loaded at start and written on shutdown");
  CLI11_PARSE(app, argc, argv);

  diagbez::service::DesignService service;
  if (!snapshot.empty() && std::filesystem::exists(snapshot)) {
    std::ifstream in(snapshot);
    std::stringstream ss;
    ss << in.rdbuf();
    service.restore(diagbez::service::Json::parse(ss.str()));
  }

  httplib::Server server;
  diagbez::service::bind(server, service);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  std::cerr << "diagbez_server listening on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "diagbez_server: cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  if (!snapshot.empty()) {
    std::ofstream out(snapshot, std::ios::trunc);
    out << service.snapshot().dump(2) << "\n";
  }
  return 0;
}
