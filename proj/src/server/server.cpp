#include "pathtrace/server.hpp"

#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pathtrace/aspect_config.hpp"

namespace pathtrace {

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ParamList parse_urlencoded(std::string_view text) {
  ParamList out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto amp = text.find('&', pos);
    auto pair = text.substr(pos, amp == std::string_view::npos ? std::string_view::npos : amp - pos);
    pos = amp == std::string_view::npos ? text.size() : amp + 1;
    if (pair.empty()) continue;
    auto eq = pair.find('=');
    auto key = std::string(pair.substr(0, eq));
    auto value = eq == std::string_view::npos ? std::string() : std::string(pair.substr(eq + 1));
    out.emplace_back(httplib::detail::decode_url(key, true), httplib::detail::decode_url(value, true));
  }
  return out;
}

std::optional<std::string> cookie_value(const std::string& header, std::string_view name) {
  std::size_t pos = 0;
  while (pos < header.size()) {
    auto semi = header.find(';', pos);
    auto part = std::string_view(header).substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
    pos = semi == std::string::npos ? header.size() : semi + 1;
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    auto eq = part.find('=');
    if (eq != std::string_view::npos && part.substr(0, eq) == name) return std::string(part.substr(eq + 1));
  }
  return std::nullopt;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

fs::path resolve(const nlohmann::json& doc, const char* key, const fs::path& base, bool required) {
  if (!doc.contains(key)) {
    if (required) throw std::runtime_error(std::string("app config: missing '") + key + "'");
    return {};
  }
  fs::path p = doc.at(key).get<std::string>();
  if (p.is_relative()) p = base / p;
  if (!fs::exists(p)) throw std::runtime_error(std::string("app config: '") + key + "' does not exist: " + p.string());
  return p;
}

std::shared_ptr<const BindingTable> weave_file(const fs::path& file, std::uint64_t version) {
  auto config = load_aspect_config(read_file(file));
  return BindingTable::weave(config, AdviceRegistry::builtins(), version);
}

}  // namespace

AppConfig AppConfig::parse(std::string_view json, const fs::path& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("app config: ") + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("app config: expected an object");
  AppConfig c;
  try {
    c.pages_dir = resolve(doc, "pages_dir", base_dir, true);
    c.components_file = resolve(doc, "components_file", base_dir, true);
    c.navigation_file = resolve(doc, "navigation_file", base_dir, true);
    c.aspects_file = resolve(doc, "aspects_file", base_dir, true);
    c.model_file = resolve(doc, "model_file", base_dir, false);
    c.overlay_file = resolve(doc, "overlay_file", base_dir, false);
    c.instrumentation_default = doc.value("instrumentation_default", true);
    c.bind_address = doc.value("bind_address", c.bind_address);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("app config: ") + e.what());
  }
  if (!fs::is_directory(c.pages_dir)) throw std::runtime_error("app config: pages_dir is not a directory");
  split_bind_address(c.bind_address);
  return c;
}

AppConfig AppConfig::load(const fs::path& file) { return parse(read_file(file), file.parent_path()); }

Profile profile_from_env() {
  const char* v = std::getenv("PATHTRACE_PROFILE");
  if (v == nullptr || std::string_view(v).empty() || std::string_view(v) == "dev") return Profile::Dev;
  if (std::string_view(v) == "prod") return Profile::Prod;
  throw std::invalid_argument(std::string("PATHTRACE_PROFILE must be dev or prod, not '") + v + "'");
}

std::pair<std::string, int> split_bind_address(const std::string& address) {
  auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0) throw std::invalid_argument("bind address must be host:port: " + address);
  int port = 0;
  auto digits = address.substr(colon + 1);
  if (digits.empty() || digits.size() > 5 || digits.find_first_not_of("0123456789") != std::string::npos ||
      (port = std::stoi(digits)) > 65535) {
    throw std::invalid_argument("bad port in bind address: " + address);
  }
  return {address.substr(0, colon), port};
}

struct Server::Impl {
  AppConfig config;
  ServerOptions options;
  Application app;
  SessionStore sessions;
  std::atomic<std::uint64_t> next_request{1};

  mutable std::mutex bindings_mutex;
  std::shared_ptr<const BindingTable> bindings;

  httplib::Server http;
  std::thread worker;

  Impl(AppConfig c, ServerOptions o)
      : config(std::move(c)),
        options(o),
        app(Application::load(config.pages_dir, config.components_file, config.navigation_file, config.model_file)),
        bindings(weave_file(config.aspects_file, 1)) {}

  std::shared_ptr<const BindingTable> snapshot() const {
    std::lock_guard lock(bindings_mutex);
    return bindings;
  }

  bool instrumentation_for(const PageRequest& req) const {
    if (options.force_off || options.profile == Profile::Prod) return false;
    for (const auto& [k, v] : req.query) {
      if (k == "__prov" && v == "on") return true;
      if (k == "__prov" && v == "off") return false;
    }
    return config.instrumentation_default;
  }

  std::string request_id() {
    char buf[24];
    std::snprintf(buf, sizeof buf, "r%06llu", static_cast<unsigned long long>(next_request.fetch_add(1)));
    return buf;
  }
};

Server::Server(AppConfig config, ServerOptions options) : impl_(std::make_unique<Impl>(std::move(config), options)) {
  auto& http = impl_->http;

  auto page = [this](const httplib::Request& req, httplib::Response& res) {
    PageRequest pr;
    pr.method = req.method == "POST" ? HttpMethod::Post : HttpMethod::Get;
    pr.path = req.path;
    auto q = req.target.find('?');
    if (q != std::string::npos) pr.query = parse_urlencoded(std::string_view(req.target).substr(q + 1));
    if (pr.method == HttpMethod::Post) {
      auto type = req.get_header_value("Content-Type");
      if (type.empty() || type.starts_with("application/x-www-form-urlencoded")) pr.form = parse_urlencoded(req.body);
    }
    pr.ajax = iequals(req.get_header_value("X-Ajax"), "true");
    if (req.has_header("Cookie")) pr.session_id = cookie_value(req.get_header_value("Cookie"), "SID");

    auto out = handle_page(pr);
    res.status = out.status;
    for (const auto& [k, v] : out.headers) res.set_header(k, v);
    if (!out.session_id.empty() && out.session_id != pr.session_id.value_or("")) {
      res.set_header("Set-Cookie", "SID=" + out.session_id + "; Path=/; HttpOnly; SameSite=Lax");
    }
    res.set_content(out.body, out.content_type);
  };
  http.Get(R"(/pages/(.+))", page);
  http.Post(R"(/pages/(.+))", page);

  http.Get("/__prov/overlay.js", [this](const httplib::Request&, httplib::Response& res) {
    if (impl_->config.overlay_file.empty()) {
      res.status = 404;
      res.set_content("overlay script not configured\n", "text/plain");
      return;
    }
    res.set_content(read_file(impl_->config.overlay_file), "application/javascript; charset=utf-8");
  });

  http.Post("/__prov/reload", [this](const httplib::Request&, httplib::Response& res) {
    if (impl_->options.profile == Profile::Prod) {
      res.status = 403;
      res.set_content("reload is disabled in the prod profile\n", "text/plain");
      return;
    }
    try {
      auto r = reload();
      nlohmann::json body{{"old", r.old_bindings}, {"new", r.new_bindings}, {"version", r.version}};
      res.set_content(body.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      nlohmann::json body{{"error", e.what()}};
      res.set_content(body.dump(), "application/json");
    }
  });

  http.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok\n", "text/plain"); });
}

Server::~Server() { stop(); }

Response Server::handle_page(const PageRequest& request) {
  RequestEnvelope env;
  env.method = request.method;
  env.ajax = request.ajax;
  env.path = request.path;
  env.session_id = request.session_id;
  env.request_id = impl_->request_id();
  for (const auto* list : {&request.query, &request.form}) {
    for (const auto& kv : *list) {
      if (kv.first != "__prov") env.params.push_back(kv);
    }
  }

  Instrumentation instr{impl_->instrumentation_for(request), nullptr};
  if (instr.enabled) instr.bindings = impl_->snapshot();

  auto failure = [&](int status, const std::string& message) {
    Response resp;
    resp.status = status;
    resp.request_id = env.request_id;
    resp.content_type = "text/plain; charset=utf-8";
    resp.body = message + "\n";
    resp.headers = {{"X-Request-Id", env.request_id}, {"X-Prov", instr.enabled ? "on" : "off"}};
    return resp;
  };

  try {
    auto resp = process_request(env, impl_->app, impl_->sessions, instr);
    if (resp.phases.empty() || resp.phases.back() != 6 || !resp.trace.well_formed()) {
      return failure(500, "internal error in request " + env.request_id + ": lifecycle ended outside Render Response");
    }
    return resp;
  } catch (const LifecycleError& e) {
    return failure(e.kind() == LifecycleError::Kind::UnknownView ? 404 : 400, e.what());
  } catch (const std::exception& e) {
    return failure(500, "internal error in request " + env.request_id + ": " + e.what());
  }
}

ReloadResult Server::reload() {
  std::lock_guard lock(impl_->bindings_mutex);
  auto fresh = weave_file(impl_->config.aspects_file, impl_->bindings->version() + 1);
  ReloadResult r{impl_->bindings->size(), fresh->size(), fresh->version()};
  impl_->bindings = std::move(fresh);
  return r;
}

std::shared_ptr<const BindingTable> Server::bindings() const { return impl_->snapshot(); }

int Server::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  impl_->worker = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return bound;
}

void Server::listen(const std::string& host, int port) {
  if (!impl_->http.listen(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

void Server::stop() {
  impl_->http.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

const AppConfig& Server::config() const { return impl_->config; }
const Application& Server::application() const { return impl_->app; }
SessionStore& Server::sessions() { return impl_->sessions; }

}  // namespace pathtrace
