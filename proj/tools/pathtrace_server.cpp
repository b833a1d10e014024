#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "pathtrace/server.hpp"

namespace {
pathtrace::Server* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"pathtrace demo server"};
  std::string config_path = "./app.json";
  std::string bind;
  bool no_prov = false;
  cli.add_option("--config", config_path, "application config (JSON)");
  cli.add_option("--bind", bind, "host:port, overrides bind_address");
  cli.add_flag("--no-prov", no_prov, "disable provenance for every request");
  CLI11_PARSE(cli, argc, argv);

  try {
    pathtrace::ServerOptions options{pathtrace::profile_from_env(), no_prov};
    auto config = pathtrace::AppConfig::load(config_path);
    if (!bind.empty()) config.bind_address = bind;
    auto [host, port] = pathtrace::split_bind_address(config.bind_address);

    pathtrace::Server server(config, options);
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "pathtrace: " << server.application().page_ids().size() << " pages, "
              << server.bindings()->size() << " bindings, profile "
              << (options.profile == pathtrace::Profile::Prod ? "prod" : "dev") << ", listening on " << host << ":"
              << port << "\n";
    server.listen(host, port);
  } catch (const std::exception& e) {
    std::cerr << "pathtrace-server: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
