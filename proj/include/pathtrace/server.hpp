#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "pathtrace/interception.hpp"
#include "pathtrace/lifecycle.hpp"

namespace pathtrace {

/// app.json. Relative paths are resolved against the config file's directory.
struct AppConfig {
  std::filesystem::path pages_dir;
  std::filesystem::path components_file;
  std::filesystem::path navigation_file;
  std::filesystem::path aspects_file;
  std::filesystem::path model_file;
  std::filesystem::path overlay_file;
  bool instrumentation_default = true;
  std::string bind_address = "127.0.0.1:8080";

  /// Throws std::runtime_error on bad JSON or paths that do not exist.
  static AppConfig parse(std::string_view json, const std::filesystem::path& base_dir);
  static AppConfig load(const std::filesystem::path& file);
};

enum class Profile { Dev, Prod };

/// PATHTRACE_PROFILE; unset means dev. Throws std::invalid_argument for other values.
Profile profile_from_env();

/// Splits `host:port`. Throws std::invalid_argument when the port is missing or bad.
std::pair<std::string, int> split_bind_address(const std::string& address);

struct ServerOptions {
  Profile profile = Profile::Dev;
  bool force_off = false;
};

/// A page request with transport details already peeled off.
struct PageRequest {
  HttpMethod method = HttpMethod::Get;
  bool ajax = false;
  std::string path;
  ParamList query;
  ParamList form;
  std::optional<std::string> session_id;
};

struct ReloadResult {
  std::size_t old_bindings = 0;
  std::size_t new_bindings = 0;
  std::uint64_t version = 0;
};

class Server {
 public:
  Server(AppConfig config, ServerOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Runs one page request through the lifecycle. Failures become 4xx/5xx responses.
  Response handle_page(const PageRequest& request);

  /// Re-reads the aspects file and swaps the binding table. The old table
  /// stays in place when the file is invalid (ConfigError propagates).
  ReloadResult reload();
  std::shared_ptr<const BindingTable> bindings() const;

  /// Binds and serves on a background thread; returns the bound port
  /// (`port` 0 picks a free one).
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

  const AppConfig& config() const;
  const Application& application() const;
  SessionStore& sessions();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pathtrace
