#include <doctest.h>

#include "fixtures.hpp"
#include "pathtrace/inspect.hpp"

using namespace pathtrace;

namespace {

Response render(const std::string& path, bool instrumented = true) {
  static const auto app = fixture::demo_app();
  SessionStore sessions;
  Instrumentation instr;
  if (instrumented) instr = {true, fixture::demo_bindings()};
  return process_request({HttpMethod::Get, false, path, {}, std::nullopt, "r000001"}, app, sessions, instr);
}

InspectError::Kind inspect_error(std::string_view html, const Selector& sel) {
  try {
    inspect(html, sel);
  } catch (const InspectError& e) {
    return e.kind();
  }
  FAIL("expected an InspectError");
  return InspectError::Kind::NoProvenance;
}

}  // namespace

TEST_CASE("selectors") {
  auto s = parse_selector("tag=ui:inputText");
  CHECK(s.kind == Selector::Kind::Tag);
  CHECK(s.value == "ui:inputText");
  s = parse_selector("name");
  CHECK(s.kind == Selector::Kind::Id);
  CHECK(s.value == "name");
  CHECK(format_location({"form.xhtml", 3, 1}) == "pages/form.xhtml:3");
}

TEST_CASE("inspect by id") {
  auto page = render("/pages/form");
  auto reports = inspect(page.body, parse_selector("name"));
  REQUIRE(reports.size() == 1);
  const auto& r = reports[0];
  CHECK(r.component_id == "name");
  CHECK(r.tag == "ui:inputText");
  REQUIRE_FALSE(r.locations.empty());
  CHECK(r.locations[0] == "pages/form.xhtml:3");
  CHECK(r.summary);
  CHECK(r.summary->path_label == "GET-initial");
  bool saw_value = false;
  for (const auto& a : r.attributes) saw_value |= a.name == "value" && a.value == "#{user.name}" && a.line == 3;
  CHECK(saw_value);
  CHECK(emit_locations(r, OutputFormat::Text).starts_with("pages/form.xhtml:3\n"));
}

TEST_CASE("inspect by tag in document order") {
  auto page = render("/pages/form");
  auto reports = inspect(page.body, parse_selector("tag=ui:inputText"));
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].component_id == "name");
  CHECK(reports[1].component_id == "age");
  CHECK(reports[1].locations[0] == "pages/form.xhtml:4");
}

TEST_CASE("listing") {
  auto rows = list_components(render("/pages/calendar").body);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == ComponentRow{"c", "ui:calendar", "pages/calendar.xhtml:4"});
  CHECK(rows[2].id == "note");
  CHECK_THROWS_AS(list_components(std::string_view("<html><body></body></html>")), InspectError);
}

TEST_CASE("errors") {
  CHECK(inspect_error(render("/pages/form", false).body, parse_selector("name")) == InspectError::Kind::NoProvenance);
  CHECK(inspect_error(render("/pages/form").body, parse_selector("ghost")) == InspectError::Kind::NoSuchComponent);
  CHECK(inspect_error(render("/pages/form").body, parse_selector("tag=ui:calendar")) ==
        InspectError::Kind::NoSuchComponent);

  auto summary_only = encode_page("<html><body></body></html>", {}, {"r1", {1, 6}, "GET-initial"}).html;
  CHECK(list_components(summary_only).empty());
  CHECK(inspect_error(summary_only, parse_selector("x")) == InspectError::Kind::NoSuchComponent);
}

TEST_CASE("a broken marker is reported, not hidden") {
  auto html = render("/pages/form").body;
  auto marker = html.find(R"(data-for="age")");
  auto start = html.find("value=\"", marker) + 7;
  html.erase(start, 10);
  auto reports = inspect(html, parse_selector("age"));
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].decode_error);
  CHECK(inspect(html, parse_selector("name")).size() == 1);
}

TEST_CASE("json report round trip") {
  auto reports = inspect(render("/pages/done").body, parse_selector("tag=ui:inputText"));
  REQUIRE(reports.size() == 1);
  auto json = to_canonical_json(reports[0]);
  CHECK(json.starts_with(R"({"schema":"prov/1","component_id":"who","tag":"ui:inputText","attributes":)"));
  CHECK(report_from_json(json) == reports[0]);
  CHECK(emit_locations(reports[0], OutputFormat::Json) == json + "\n");
  CHECK_THROWS_AS(report_from_json("{}"), MalformedPayload);
  CHECK_THROWS_AS(report_from_json("[1"), MalformedPayload);
}
