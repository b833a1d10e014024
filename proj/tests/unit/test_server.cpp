#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <regex>

#include "fixtures.hpp"
#include "pathtrace/server.hpp"

using namespace pathtrace;

namespace {

struct Running {
  Server server;
  int port;

  explicit Running(const std::filesystem::path& config, ServerOptions options = {})
      : server(AppConfig::load(config), options), port(server.start("127.0.0.1", 0)) {}

  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

std::string sid_from(const httplib::Result& res) {
  auto cookie = res->get_header_value("Set-Cookie");
  auto start = cookie.find("SID=") + 4;
  return cookie.substr(start, cookie.find(';') - start);
}

std::size_t marker_count(const std::string& body) { return decode_page(body).marker_count; }

}  // namespace

TEST_CASE("get over http") {
  Running run(fixture::demo_dir() / "app.json");
  auto cli = run.client();
  auto res = cli.Get("/pages/form");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(std::regex_match(res->get_header_value("X-Request-Id"), std::regex("r[0-9]{6}")));
  CHECK(res->get_header_value("X-Prov") == "on");
  CHECK(res->get_header_value("Content-Type").starts_with("text/html"));
  CHECK(sid_from(res).size() == 16);
  CHECK(res->body.find("class=\"prov-summary\"") != std::string::npos);
  CHECK(decode_page(res->body).records.size() == 4);

  auto off = cli.Get("/pages/form?__prov=off");
  CHECK(off->get_header_value("X-Prov") == "off");
  CHECK(marker_count(off->body) == 0);
  CHECK(strip(res->body) == off->body);
}

TEST_CASE("cookie keeps the session across a postback and ajax") {
  Running run(fixture::demo_dir() / "app.json");
  auto cli = run.client();
  auto first = cli.Get("/pages/calendar");
  httplib::Headers cookie{{"Cookie", "SID=" + sid_from(first)}};
  auto ajax = cli.Post("/pages/calendar", httplib::Headers{{"Cookie", "SID=" + sid_from(first)}, {"X-Ajax", "true"}},
                       "render=c&param2=1", "application/x-www-form-urlencoded");
  REQUIRE(ajax);
  CHECK(ajax->status == 200);
  CHECK(ajax->get_header_value("Content-Type").starts_with("application/xml"));
  CHECK(ajax->get_header_value("Set-Cookie").empty());
  auto page = decode_page(ajax->body);
  REQUIRE(page.records.size() == 1);
  CHECK(page.summary->path_label == "AJAX-special");

  auto post = cli.Post("/pages/form", cookie, "name=Lin&age=4&submit=Save", "application/x-www-form-urlencoded");
  CHECK(decode_page(post->body).summary->path_label == "POST-navigated");
  CHECK(post->body.find("value=\"Lin\"") != std::string::npos);
}

TEST_CASE("error statuses") {
  Running run(fixture::demo_dir() / "app.json");
  auto cli = run.client();
  auto missing = cli.Get("/pages/nowhere");
  CHECK(missing->status == 404);
  CHECK(!missing->get_header_value("X-Request-Id").empty());
  auto no_render = cli.Post("/pages/calendar", httplib::Headers{{"X-Ajax", "TRUE"}}, "param2=1",
                            "application/x-www-form-urlencoded");
  CHECK(no_render->status == 400);
  CHECK(cli.Get("/healthz")->status == 200);
  auto overlay = cli.Get("/__prov/overlay.js");
  CHECK(overlay->status == 200);
  CHECK(overlay->get_header_value("Content-Type").starts_with("application/javascript"));
}

TEST_CASE("instrumentation switches") {
  SUBCASE("config default off, query on") {
    fixture::DemoCopy copy;
    auto text = fixture::read(copy.config());
    text.replace(text.find("\"instrumentation_default\": true"), 31, "\"instrumentation_default\": false");
    copy.write("app.json", text);
    Running run(copy.config());
    auto cli = run.client();
    CHECK(marker_count(cli.Get("/pages/form")->body) == 0);
    CHECK(marker_count(cli.Get("/pages/form?__prov=on")->body) > 0);
  }
  SUBCASE("forced off") {
    Running run(fixture::demo_dir() / "app.json", {Profile::Dev, true});
    auto res = run.client().Get("/pages/form?__prov=on");
    CHECK(res->get_header_value("X-Prov") == "off");
    CHECK(marker_count(res->body) == 0);
  }
  SUBCASE("prod profile") {
    Running run(fixture::demo_dir() / "app.json", {Profile::Prod, false});
    auto cli = run.client();
    CHECK(marker_count(cli.Get("/pages/form?__prov=on")->body) == 0);
    CHECK(cli.Post("/__prov/reload", "", "application/json")->status == 403);
  }
}

TEST_CASE("reload swaps bindings without a restart") {
  fixture::DemoCopy copy;
  Running run(copy.config());
  auto cli = run.client();
  auto has_interceptor = [&] {
    auto first = cli.Get("/pages/calendar");
    auto res = cli.Post("/pages/calendar", httplib::Headers{{"Cookie", "SID=" + sid_from(first)}, {"X-Ajax", "true"}},
                        "render=c", "application/x-www-form-urlencoded");
    auto page = decode_page(res->body);
    const auto& rec = page.records.at(0);
    return std::any_of(rec.server_path.begin(), rec.server_path.end(),
                       [](const ServerPathEntry& e) { return e.unit == units::kParamInterceptor; });
  };
  CHECK(has_interceptor());

  auto aspects = fixture::read(copy.dir / "aspects.json");
  auto line = aspects.find(",\n    {\"pointcut\": \"execution(* demo.ajax.*->handle(..))\"");
  REQUIRE(line != std::string::npos);
  aspects.erase(line, aspects.find('}', line) + 1 - line);
  copy.write("aspects.json", aspects);

  auto res = cli.Post("/__prov/reload", "", "application/json");
  REQUIRE(res->status == 200);
  auto body = nlohmann::json::parse(res->body);
  CHECK(body["old"] == 11);
  CHECK(body["new"] == 10);
  CHECK(body["version"] == 2);
  CHECK_FALSE(has_interceptor());

  copy.write("aspects.json", "{\"bindings\": [");
  res = cli.Post("/__prov/reload", "", "application/json");
  CHECK(res->status == 400);
  CHECK(nlohmann::json::parse(res->body).contains("error"));
  CHECK(run.server.bindings()->size() == 10);
}

TEST_CASE("handle_page without a socket") {
  Server server(AppConfig::load(fixture::demo_dir() / "app.json"));
  auto a = server.handle_page({HttpMethod::Get, false, "/pages/done", {}, {}, std::nullopt});
  auto b = server.handle_page({HttpMethod::Get, false, "/pages/done", {{"__prov", "off"}}, {}, std::nullopt});
  CHECK(a.status == 200);
  CHECK(a.request_id != b.request_id);
  CHECK(strip(a.body) == b.body);
  CHECK(server.sessions().size() == 2);
}

TEST_CASE("app config") {
  auto dir = fixture::demo_dir();
  auto cfg = AppConfig::load(dir / "app.json");
  CHECK(cfg.pages_dir == dir / "pages");
  CHECK(cfg.bind_address == "127.0.0.1:8080");
  CHECK(cfg.instrumentation_default);
  CHECK_THROWS(AppConfig::parse("{", dir));
  CHECK_THROWS(AppConfig::parse(R"({"pages_dir": "nope", "components_file": "components.txt",
    "navigation_file": "navigation.txt", "aspects_file": "aspects.json"})", dir));
  CHECK_THROWS(AppConfig::parse(R"({"pages_dir": "pages"})", dir));
  CHECK_THROWS(AppConfig::load(dir / "missing.json"));

  CHECK(split_bind_address("0.0.0.0:9000") == std::pair<std::string, int>{"0.0.0.0", 9000});
  CHECK_THROWS_AS(split_bind_address("localhost"), std::invalid_argument);
  CHECK_THROWS_AS(split_bind_address("h:70000"), std::invalid_argument);

  ::unsetenv("PATHTRACE_PROFILE");
  CHECK(profile_from_env() == Profile::Dev);
  ::setenv("PATHTRACE_PROFILE", "prod", 1);
  CHECK(profile_from_env() == Profile::Prod);
  ::setenv("PATHTRACE_PROFILE", "qa", 1);
  CHECK_THROWS_AS(profile_from_env(), std::invalid_argument);
  ::unsetenv("PATHTRACE_PROFILE");
}
