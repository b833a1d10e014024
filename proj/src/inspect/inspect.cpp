#include "pathtrace/inspect.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace pathtrace {

namespace {

using ojson = nlohmann::ordered_json;

const char* kind_name(InspectError::Kind kind) {
  return kind == InspectError::Kind::NoProvenance ? "NoProvenance" : "NoSuchComponent";
}

void require_markers(const DecodedPage& page) {
  if (page.marker_count == 0) {
    throw InspectError(InspectError::Kind::NoProvenance,
                       "page carries no provenance markers; request it from a dev-profile server without __prov=off");
  }
}

ojson summary_json(const PhaseSummary& s) {
  ojson doc;
  doc["request_id"] = s.request_id;
  doc["phases_executed"] = s.phases_executed;
  doc["path_label"] = s.path_label;
  return doc;
}

}  // namespace

InspectError::InspectError(Kind kind, const std::string& message)
    : std::runtime_error(std::string(kind_name(kind)) + ": " + message), kind_(kind) {}

Selector parse_selector(std::string_view text) {
  if (text.starts_with("tag=")) return {Selector::Kind::Tag, std::string(text.substr(4))};
  return {Selector::Kind::Id, std::string(text)};
}

std::string format_location(const SourceLocation& loc) { return "pages/" + loc.file + ":" + std::to_string(loc.line); }

InspectionReport make_report(const ProvenanceRecord& record, const std::optional<PhaseSummary>& summary) {
  InspectionReport report;
  report.component_id = record.component_id;
  report.tag = record.tag;
  report.server_path = record.server_path;
  report.summary = summary;
  for (const auto& e : record.attribute_events) report.attributes.push_back({e.name, e.value, e.by, e.line});

  auto add_location = [&](int line) {
    if (record.source.file.empty() || line < 1) return;
    auto loc = format_location({record.source.file, line, 1});
    if (std::find(report.locations.begin(), report.locations.end(), loc) == report.locations.end()) {
      report.locations.push_back(std::move(loc));
    }
  };
  add_location(record.source.line);
  for (const auto& e : record.attribute_events) add_location(e.line);
  return report;
}

std::vector<InspectionReport> inspect(const DecodedPage& page, const Selector& selector) {
  require_markers(page);
  std::vector<InspectionReport> out;
  if (selector.kind == Selector::Kind::Id) {
    for (const auto& r : page.records) {
      if (r.component_id == selector.value) return {make_report(r, page.summary)};
    }
    for (const auto& e : page.errors) {
      if (e.data_for == selector.value) {
        InspectionReport report;
        report.component_id = e.data_for;
        report.summary = page.summary;
        report.decode_error = e.message;
        return {report};
      }
    }
  } else {
    for (const auto& r : page.records) {
      if (r.tag == selector.value) out.push_back(make_report(r, page.summary));
    }
  }
  if (out.empty()) {
    throw InspectError(InspectError::Kind::NoSuchComponent,
                       (selector.kind == Selector::Kind::Id ? "no element with id '" : "no element with tag '") +
                           selector.value + "'");
  }
  return out;
}

std::vector<InspectionReport> inspect(std::string_view html, const Selector& selector) {
  return inspect(decode_page(html), selector);
}

std::vector<ComponentRow> list_components(const DecodedPage& page) {
  require_markers(page);
  std::vector<ComponentRow> rows;
  for (const auto& r : page.records) rows.push_back({r.component_id, r.tag, format_location(r.source)});
  return rows;
}

std::vector<ComponentRow> list_components(std::string_view html) { return list_components(decode_page(html)); }

std::string to_canonical_json(const InspectionReport& report) {
  ojson doc;
  doc["schema"] = kProvSchema;
  doc["component_id"] = report.component_id;
  doc["tag"] = report.tag;
  doc["attributes"] = ojson::array();
  for (const auto& a : report.attributes) {
    doc["attributes"].push_back({{"name", a.name}, {"value", a.value}, {"set_by", a.set_by}, {"line", a.line}});
  }
  doc["server_path"] = ojson::array();
  for (const auto& s : report.server_path) {
    doc["server_path"].push_back({{"unit", s.unit}, {"method", s.method}, {"phase", s.phase}});
  }
  doc["locations"] = report.locations;
  if (report.summary) doc["summary"] = summary_json(*report.summary);
  if (report.decode_error) doc["decode_error"] = *report.decode_error;
  return doc.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

InspectionReport report_from_json(std::string_view json) {
  try {
    auto doc = ojson::parse(json);
    if (doc.value("schema", std::string()) != kProvSchema) throw MalformedPayload("unsupported report schema");
    InspectionReport report;
    report.component_id = doc.at("component_id").get<std::string>();
    report.tag = doc.at("tag").get<std::string>();
    for (const auto& a : doc.at("attributes")) {
      report.attributes.push_back({a.at("name").get<std::string>(), a.at("value").get<std::string>(),
                                   a.at("set_by").get<std::string>(), a.at("line").get<int>()});
    }
    for (const auto& s : doc.at("server_path")) {
      report.server_path.push_back({s.at("unit").get<std::string>(), s.at("method").get<std::string>(), s.at("phase").get<int>()});
    }
    report.locations = doc.at("locations").get<std::vector<std::string>>();
    if (doc.contains("summary")) {
      const auto& s = doc["summary"];
      report.summary = PhaseSummary{s.at("request_id").get<std::string>(), s.at("phases_executed").get<std::vector<int>>(),
                                    s.at("path_label").get<std::string>()};
    }
    if (doc.contains("decode_error")) report.decode_error = doc["decode_error"].get<std::string>();
    return report;
  } catch (const ojson::exception& e) {
    throw MalformedPayload(std::string("bad report: ") + e.what());
  }
}

std::string emit_locations(const InspectionReport& report, OutputFormat format) {
  if (format == OutputFormat::Json) return to_canonical_json(report) + "\n";
  std::string out;
  for (const auto& loc : report.locations) out += loc + "\n";
  return out;
}

}  // namespace pathtrace
