#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "generators.hpp"
#include "pathtrace/lifecycle.hpp"

using namespace pathtrace;

namespace {

struct Client {
  const Application& app;
  SessionStore& sessions;
  Instrumentation instr;
  std::optional<std::string> sid;
  int counter = 0;

  Response send(HttpMethod method, const std::string& path, ParamList params = {}, bool ajax = false) {
    RequestEnvelope env{method, ajax, path, std::move(params), sid, "t" + std::to_string(++counter)};
    auto resp = process_request(env, app, sessions, instr);
    sid = resp.session_id;
    return resp;
  }
  Response get(const std::string& path) { return send(HttpMethod::Get, path); }
  Response post(const std::string& path, ParamList params) { return send(HttpMethod::Post, path, std::move(params)); }
  Response ajax(const std::string& path, ParamList params) { return send(HttpMethod::Post, path, std::move(params), true); }
};

Instrumentation on() { return {true, fixture::demo_bindings()}; }

const ProvenanceRecord* record_for(const Response& r, std::string_view id) {
  for (const auto& rec : r.records)
    if (rec.component_id == id) return &rec;
  return nullptr;
}

bool has_unit(const ProvenanceRecord& r, std::string_view unit) {
  for (const auto& e : r.server_path)
    if (e.unit == unit) return true;
  return false;
}

LifecycleError::Kind lifecycle_error(auto&& f) {
  try {
    f();
  } catch (const LifecycleError& e) {
    return e.kind();
  }
  FAIL("expected a LifecycleError");
  return LifecycleError::Kind::BadRequest;
}

}  // namespace

TEST_CASE("phase paths") {
  auto app = fixture::demo_app();
  SessionStore sessions;
  Client c{app, sessions, on()};

  auto first = c.get("/pages/form");
  CHECK(first.phases == std::vector<int>{1, 6});
  CHECK(first.path_label == "GET-initial");
  CHECK(first.view_id == "form.xhtml");
  CHECK(*first.header("X-Request-Id") == "t1");
  CHECK(*first.header("x-prov") == "on");

  auto invalid = c.post("/pages/form", {{"name", ""}, {"age", "x2"}, {"submit", "Save"}});
  CHECK(invalid.phases == std::vector<int>{1, 2, 3, 6});
  CHECK(invalid.path_label == "POST-validation-failed");
  CHECK(invalid.body.find("Name: a value is required") != std::string::npos);
  CHECK(invalid.body.find("demo.convert.IntegerConverter") != std::string::npos);

  auto valid = c.post("/pages/form", {{"name", "Grace"}, {"age", "12"}, {"submit", "Save"}});
  CHECK(valid.phases == std::vector<int>{1, 2, 3, 4, 5, 6});
  CHECK(valid.path_label == "POST-navigated");
  CHECK(valid.view_id == "done.xhtml");
  CHECK(valid.body.find("value=\"Grace\"") != std::string::npos);

  auto no_button = c.post("/pages/form", {{"name", "Grace"}, {"age", "12"}});
  CHECK(no_button.path_label == "POST-success");
  CHECK(no_button.view_id == "form.xhtml");

  c.get("/pages/calendar");
  auto partial = c.ajax("/pages/calendar", {{"render", "c"}, {"param2", "1"}});
  CHECK(partial.phases == std::vector<int>{1, 2, 3, 4, 5, 6});
  CHECK(partial.path_label == "AJAX-special");
  CHECK(partial.content_type.starts_with("application/xml"));
  CHECK(partial.body.starts_with("<partial-response><update id=\"c\">"));

  for (const auto& r : {first, invalid, valid, partial}) {
    CHECK(r.trace.well_formed());
    CHECK(r.violations.empty());
  }
}

TEST_CASE("validation messages") {
  ComponentNode age{"age", "demo.component.html.InputText", "ui:inputText",
                    {{"label", "Age"}, {"converter", "int"}}, "12", true, {}, {}, {}};
  std::vector<ComponentNode> tree{age};
  CHECK(process_validations(tree, {}, nullptr).empty());
  CHECK(tree[0].valid);

  tree[0].value = "x2";
  auto failures = process_validations(tree, {}, nullptr);
  REQUIRE(failures.size() == 1);
  CHECK(failures[0].message == "Age: 'x2' is not an integer (demo.convert.IntegerConverter)");
  CHECK(failures[0].unit == "demo.convert.IntegerConverter");
  CHECK_FALSE(tree[0].valid);

  tree[0].value = "";
  CHECK(process_validations(tree, {}, nullptr).empty());

  ComponentNode name{"name", "demo.component.html.InputText", "ui:inputText", {{"required", "true"}}, "", true, {}, {}, {}};
  std::vector<ComponentNode> tree2{name};
  failures = process_validations(tree2, {}, nullptr);
  REQUIRE(failures.size() == 1);
  CHECK(failures[0].message == "name: a value is required");
}

TEST_CASE("ajax routing") {
  auto app = fixture::demo_app();
  SessionStore sessions;
  Client c{app, sessions, on()};
  c.get("/pages/calendar");

  auto special = c.ajax("/pages/calendar", {{"render", "c"}, {"param2", ""}});
  const auto* rec = record_for(special, "c");
  REQUIRE(rec);
  CHECK(has_unit(*rec, units::kParamInterceptor));
  CHECK(has_unit(*rec, units::kSpecialAjaxHandler));
  CHECK_FALSE(has_unit(*rec, units::kDefaultAjaxHandler));
  CHECK(special.records.size() == 1);
  CHECK(special.body.find("special") != std::string::npos);

  auto plain = c.ajax("/pages/calendar", {{"render", "c"}});
  rec = record_for(plain, "c");
  REQUIRE(rec);
  CHECK(plain.path_label == "AJAX-default");
  CHECK(has_unit(*rec, units::kParamInterceptor));
  CHECK(has_unit(*rec, units::kDefaultAjaxHandler));
  CHECK_FALSE(has_unit(*rec, units::kSpecialAjaxHandler));

  auto panel = c.ajax("/pages/calendar", {{"render", "details"}});
  CHECK(panel.body.find("id=\"note\"") != std::string::npos);
  CHECK(panel.records.size() == 2);

  CHECK(lifecycle_error([&] { c.ajax("/pages/calendar", {{"render", "nope"}}); }) ==
        LifecycleError::Kind::UnknownRenderTarget);
  CHECK(lifecycle_error([&] { c.ajax("/pages/calendar", {{"param2", "1"}}); }) ==
        LifecycleError::Kind::MissingRenderParam);
  CHECK(lifecycle_error([&] { c.send(HttpMethod::Get, "/pages/calendar", {{"render", "c"}}, true); }) ==
        LifecycleError::Kind::BadRequest);
  CHECK(lifecycle_error([&] { c.get("/pages/missing"); }) == LifecycleError::Kind::UnknownView);
  CHECK(lifecycle_error([&] { c.get("/pages/../secret"); }) == LifecycleError::Kind::UnknownView);
}

TEST_CASE("ajax without a saved view renders the whole page") {
  auto app = fixture::demo_app();
  SessionStore sessions;
  Client c{app, sessions, on()};
  auto r = c.ajax("/pages/calendar", {{"render", "c"}, {"param2", "1"}});
  CHECK(r.phases == std::vector<int>{1, 6});
  CHECK(r.path_label == "AJAX-view-recreated");
  CHECK(*r.header("X-Prov-Note") == "view-recreated");
  CHECK(r.body.starts_with("<html"));
}

TEST_CASE("restore_view returns an independent copy") {
  auto app = fixture::demo_app();
  SessionStore sessions;
  Client c{app, sessions, {}};
  c.get("/pages/form");
  CHECK_FALSE(restore_view(sessions, *c.sid, "done.xhtml"));
  CHECK_FALSE(restore_view(sessions, "nope", "form.xhtml"));
  auto a = restore_view(sessions, *c.sid, "form.xhtml");
  REQUIRE(a);
  find_component(a->roots, "name")->value = "mutated";
  auto b = restore_view(sessions, *c.sid, "form.xhtml");
  CHECK(find_component(b->roots, "name")->value == "Ada");
  auto state = sessions.state(*c.sid, "form.xhtml");
  REQUIRE(state);
  CHECK(state->saved_at == "t1");
}

TEST_CASE("session ids") {
  SessionStore store;
  std::set<std::string> ids;
  for (int i = 0; i < 200; ++i) {
    auto id = store.create({});
    CHECK(id.size() == 16);
    CHECK(id.find_first_not_of("0123456789abcdef") == std::string::npos);
    ids.insert(id);
  }
  CHECK(ids.size() == 200);
  CHECK(store.size() == 200);
}

TEST_CASE("sessions do not share model state") {
  auto app = fixture::demo_app();
  SessionStore sessions;
  Client a{app, sessions, {}};
  Client b{app, sessions, {}};
  a.get("/pages/form");
  b.get("/pages/form");
  CHECK(*a.sid != *b.sid);
  a.post("/pages/form", {{"name", "Zed"}, {"age", "1"}, {"submit", "Save"}});
  CHECK(b.get("/pages/done").body.find("value=\"Ada\"") != std::string::npos);
  CHECK(a.get("/pages/done").body.find("value=\"Zed\"") != std::string::npos);
  CHECK(app.model_seed().get("user", "name") == "Ada");

  Client stale{app, sessions, {}, std::string("deadbeefdeadbeef")};
  auto r = stale.get("/pages/form");
  CHECK(r.session_id != "deadbeefdeadbeef");
}

TEST_CASE("rendering is deterministic and instrumentation only adds markers") {
  auto app = fixture::demo_app();
  for (const auto& page : app.page_ids()) {
    SessionStore s1, s2, s3;
    Client off1{app, s1, {}};
    Client off2{app, s2, {}};
    Client inst{app, s3, on()};
    auto a = off1.get("/pages/" + page);
    auto b = off2.get("/pages/" + page);
    auto c = inst.get("/pages/" + page);
    CHECK(a.body == b.body);
    CHECK(a.records.empty());
    CHECK(a.event_count == 0);
    CHECK(*a.header("X-Prov") == "off");
    CHECK(strip(c.body) == a.body);
    CHECK(decode_page(c.body).records == c.records);
  }
}

TEST_CASE("navigation rules") {
  auto rules = NavigationRules::parse("# c\nform.xhtml\tsuccess\tdone.xhtml\n\na.xhtml\tx\tb.xhtml\n");
  CHECK(rules.size() == 2);
  CHECK(rules.find("form.xhtml", "success") == "done.xhtml");
  CHECK_FALSE(rules.find("form.xhtml", "x"));
  CHECK_THROWS_AS(NavigationRules::parse("a\tb\tc\na\tb\td\n"), std::invalid_argument);
  CHECK_THROWS_AS(NavigationRules::parse("a b c\n"), std::invalid_argument);
}

TEST_CASE("view ids from paths") {
  CHECK(view_id_from_path("/pages/form") == "form.xhtml");
  CHECK(view_id_from_path("form.xhtml") == "form.xhtml");
  CHECK(view_id_from_path("/pages/sub/x") == "sub/x.xhtml");
  CHECK_FALSE(view_id_from_path("/pages/../x"));
  CHECK_FALSE(view_id_from_path(""));
}

TEST_CASE("phases stay ordered across random request sequences") {
  auto app = fixture::demo_app();
  SessionStore sessions;
  gen::Rng rng(77);
  for (int session = 0; session < 20; ++session) {
    Client c{app, sessions, gen::coin(rng) ? on() : Instrumentation{}};
    for (int step = 0; step < 15; ++step) {
      Response r;
      switch (gen::pick(rng, 0, 5)) {
        case 0: r = c.get("/pages/" + gen::one_of(rng, app.page_ids())); break;
        case 1: r = c.post("/pages/form", {{"name", gen::coin(rng) ? "" : "N"}, {"age", gen::coin(rng) ? "7" : "q"}, {"submit", "Save"}}); break;
        case 2: r = c.post("/pages/calendar", {{"c", "2024-01-01"}, {"refresh", "Refresh"}}); break;
        case 3: r = c.ajax("/pages/calendar", {{"render", "c"}, {"param2", "1"}}); break;
        case 4: r = c.ajax("/pages/calendar", {{"render", gen::coin(rng) ? "c" : "details"}}); break;
        default: r = c.ajax("/pages/done", {{"render", "c"}}); break;
      }
      CAPTURE(r.path_label);
      REQUIRE(!r.phases.empty());
      CHECK(r.phases.front() == 1);
      CHECK(r.phases.back() == 6);
      for (std::size_t k = 1; k < r.phases.size(); ++k) CHECK(r.phases[k - 1] < r.phases[k]);
      CHECK(r.trace.well_formed());
      CHECK(r.violations.empty());
    }
  }
}
