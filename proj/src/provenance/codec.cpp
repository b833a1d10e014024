#include <algorithm>
#include <array>

#include <nlohmann/json.hpp>

#include "html_scan.hpp"
#include "pathtrace/provenance.hpp"

namespace pathtrace {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kMetaOpen = R"(<input type="hidden" class="prov-meta" data-for=")";
constexpr std::string_view kMetaMid = R"(" value=")";
constexpr std::string_view kMetaClose = R"("/>)";
constexpr std::string_view kSummaryOpen = R"(<input type="hidden" class="prov-summary" value=")";

std::string dump(const ojson& doc) { return doc.dump(-1, ' ', false, ojson::error_handler_t::replace); }

[[noreturn]] void bad(const std::string& what) { throw MalformedPayload(what); }

const ojson& field(const ojson& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

std::string str(const ojson& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

int integer(const ojson& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_number_integer()) bad(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

const ojson& array(const ojson& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_array()) bad(std::string("field '") + key + "' must be an array");
  return v;
}

void only_fields(const ojson& obj, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) bad("expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) bad("unexpected field '" + key + "'");
  }
}

ojson parse_versioned(std::string_view json) {
  ojson doc;
  try {
    doc = ojson::parse(json);
  } catch (const ojson::parse_error& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("payload must be an object");
  if (doc.empty() || doc.begin().key() != "schema") bad("'schema' must be the first field");
  if (str(doc, "schema") != kProvSchema) bad("unsupported schema '" + str(doc, "schema") + "'");
  return doc;
}

int phase_value(const ojson& obj, const char* key) {
  int p = integer(obj, key);
  if (p < 0 || p > 6) bad("phase out of range");
  return p;
}

}  // namespace

std::string to_canonical_json(const ProvenanceRecord& r) {
  ojson doc;
  doc["schema"] = kProvSchema;
  doc["component_id"] = r.component_id;
  doc["type_path"] = r.type_path;
  doc["tag"] = r.tag;
  doc["source"] = {{"file", r.source.file}, {"line", r.source.line}, {"column", r.source.column}};
  doc["attribute_events"] = ojson::array();
  for (const auto& e : r.attribute_events) {
    doc["attribute_events"].push_back({{"name", e.name}, {"value", e.value}, {"by", e.by}, {"line", e.line}});
  }
  doc["server_path"] = ojson::array();
  for (const auto& s : r.server_path) {
    doc["server_path"].push_back({{"unit", s.unit}, {"method", s.method}, {"phase", s.phase}});
  }
  doc["request_id"] = r.request_id;
  if (r.session_id) doc["session_id"] = *r.session_id;
  return dump(doc);
}

std::string to_canonical_json(const PhaseSummary& s) {
  ojson doc;
  doc["schema"] = kProvSchema;
  doc["request_id"] = s.request_id;
  doc["phases_executed"] = s.phases_executed;
  doc["path_label"] = s.path_label;
  return dump(doc);
}

ProvenanceRecord record_from_json(std::string_view json) {
  auto doc = parse_versioned(json);
  only_fields(doc, {"schema", "component_id", "type_path", "tag", "source", "attribute_events", "server_path",
                    "request_id", "session_id"});
  ProvenanceRecord r;
  r.component_id = str(doc, "component_id");
  r.type_path = str(doc, "type_path");
  r.tag = str(doc, "tag");
  const auto& src = field(doc, "source");
  only_fields(src, {"file", "line", "column"});
  r.source = {str(src, "file"), integer(src, "line"), integer(src, "column")};
  for (const auto& e : array(doc, "attribute_events")) {
    only_fields(e, {"name", "value", "by", "line"});
    r.attribute_events.push_back({str(e, "name"), str(e, "value"), str(e, "by"), integer(e, "line")});
  }
  for (const auto& s : array(doc, "server_path")) {
    only_fields(s, {"unit", "method", "phase"});
    r.server_path.push_back({str(s, "unit"), str(s, "method"), phase_value(s, "phase")});
  }
  r.request_id = str(doc, "request_id");
  if (doc.contains("session_id")) r.session_id = str(doc, "session_id");
  return r;
}

PhaseSummary summary_from_json(std::string_view json) {
  auto doc = parse_versioned(json);
  only_fields(doc, {"schema", "request_id", "phases_executed", "path_label"});
  PhaseSummary s;
  s.request_id = str(doc, "request_id");
  for (const auto& p : array(doc, "phases_executed")) {
    if (!p.is_number_integer() || p.get<int>() < 1 || p.get<int>() > 6) bad("phases_executed entries must be 1..6");
    s.phases_executed.push_back(p.get<int>());
  }
  s.path_label = str(doc, "path_label");
  return s;
}

std::string base64url_encode(std::string_view bytes) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    auto n = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8) |
             static_cast<unsigned char>(bytes[i + 2]);
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  if (auto rest = bytes.size() - i; rest > 0) {
    unsigned n = static_cast<unsigned char>(bytes[i]) << 16;
    if (rest == 2) n |= static_cast<unsigned char>(bytes[i + 1]) << 8;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    if (rest == 2) out += kAlphabet[(n >> 6) & 63];
  }
  return out;
}

std::string base64url_decode(std::string_view text) {
  while (!text.empty() && text.back() == '=') text.remove_suffix(1);
  if (text.size() % 4 == 1) bad("base64 length is invalid");
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '-') return 62;
    if (c == '_') return 63;
    return -1;
  };
  std::string out;
  out.reserve(text.size() * 3 / 4);
  unsigned buffer = 0;
  int bits = 0;
  for (char c : text) {
    int v = value(c);
    if (v < 0) bad("invalid base64 character");
    buffer = (buffer << 6) | static_cast<unsigned>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out += static_cast<char>((buffer >> bits) & 0xFF);
    }
  }
  if (bits > 0 && (buffer & ((1u << bits) - 1)) != 0) bad("non-canonical base64 tail");
  return out;
}

std::size_t marker_size(std::string_view component_id, std::size_t payload_length) {
  return kMetaOpen.size() + detail::html_escape(component_id).size() + kMetaMid.size() + payload_length + kMetaClose.size();
}

EncodeResult encode_page(std::string_view html, const std::vector<ProvenanceRecord>& records, const PhaseSummary& summary) {
  std::vector<std::pair<std::string, std::size_t>> element_at;
  detail::HtmlScanner scanner(html);
  while (auto tag = scanner.next()) {
    if (tag->is_end) continue;
    if (const auto* id = tag->attribute("id")) {
      auto known = std::find_if(element_at.begin(), element_at.end(), [&](const auto& e) { return e.first == *id; });
      if (known == element_at.end()) element_at.emplace_back(*id, tag->begin);
    }
  }

  struct Insertion {
    std::size_t offset;
    std::string text;
  };
  std::vector<Insertion> inserts;
  EncodeResult result;
  for (const auto& record : records) {
    auto it = std::find_if(element_at.begin(), element_at.end(), [&](const auto& e) { return e.first == record.component_id; });
    if (it == element_at.end()) {
      result.dropped.push_back(record.component_id);
      continue;
    }
    std::string marker(kMetaOpen);
    marker += detail::html_escape(record.component_id);
    marker += kMetaMid;
    marker += base64url_encode(to_canonical_json(record));
    marker += kMetaClose;
    inserts.push_back({it->second, std::move(marker)});
  }

  std::size_t body_close = html.rfind("</body>");
  std::string summary_marker(kSummaryOpen);
  summary_marker += base64url_encode(to_canonical_json(summary));
  summary_marker += kMetaClose;
  inserts.push_back({body_close == std::string_view::npos ? html.size() : body_close, std::move(summary_marker)});

  std::stable_sort(inserts.begin(), inserts.end(), [](const auto& a, const auto& b) { return a.offset < b.offset; });
  std::size_t extra = 0;
  for (const auto& ins : inserts) extra += ins.text.size();
  result.html.reserve(html.size() + extra);
  std::size_t cursor = 0;
  for (const auto& ins : inserts) {
    result.html.append(html.substr(cursor, ins.offset - cursor));
    result.html += ins.text;
    cursor = ins.offset;
  }
  result.html.append(html.substr(cursor));
  return result;
}

std::string strip(std::string_view html) {
  std::string out;
  out.reserve(html.size());
  std::size_t cursor = 0;
  detail::HtmlScanner scanner(html);
  while (auto tag = scanner.next()) {
    if (tag->is_end || !(tag->has_class("prov-meta") || tag->has_class("prov-summary"))) continue;
    std::size_t remove_end = tag->end;
    if (!tag->self_closing && !detail::is_void_element(tag->name)) {
      int depth = 1;
      detail::HtmlScanner inner(html, tag->end);
      while (auto t = inner.next()) {
        if (t->name != tag->name || t->self_closing) continue;
        depth += t->is_end ? -1 : 1;
        if (depth == 0) {
          remove_end = t->end;
          break;
        }
      }
    }
    out.append(html.substr(cursor, tag->begin - cursor));
    cursor = remove_end;
    scanner.seek(remove_end);
  }
  out.append(html.substr(cursor));
  return out;
}

DecodedPage decode_page(std::string_view html) {
  DecodedPage page;
  detail::HtmlScanner scanner(html);
  while (auto tag = scanner.next()) {
    if (tag->is_end) continue;
    bool meta = tag->has_class("prov-meta");
    bool summary = tag->has_class("prov-summary");
    if (!meta && !summary) continue;
    ++page.marker_count;
    const auto* data_for = tag->attribute("data-for");
    std::string owner = data_for ? *data_for : std::string();
    try {
      const auto* value = tag->attribute("value");
      if (value == nullptr) bad("marker has no value attribute");
      auto json = base64url_decode(*value);
      if (meta) {
        auto record = record_from_json(json);
        if (data_for && record.component_id != *data_for) bad("data-for does not match component_id");
        page.records.push_back(std::move(record));
      } else if (page.summary) {
        bad("more than one prov-summary marker");
      } else {
        page.summary = summary_from_json(json);
      }
    } catch (const MalformedPayload& e) {
      page.errors.push_back({meta ? owner : std::string("<summary>"), e.what()});
    }
  }
  return page;
}

}  // namespace pathtrace
