#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pathtrace/template.hpp"

namespace pathtrace {

inline constexpr std::string_view kProvSchema = "prov/1";

struct AttributeEvent {
  std::string name;
  std::string value;
  std::string by;
  int line = 0;

  bool operator==(const AttributeEvent&) const = default;
};

struct ServerPathEntry {
  std::string unit;
  std::string method;
  int phase = 0;

  bool operator==(const ServerPathEntry&) const = default;
};

/// Everything the server learned about one rendered component.
struct ProvenanceRecord {
  std::string component_id;
  std::string type_path;
  std::string tag;
  SourceLocation source;
  std::vector<AttributeEvent> attribute_events;
  std::vector<ServerPathEntry> server_path;
  std::string request_id;
  std::optional<std::string> session_id;

  bool operator==(const ProvenanceRecord&) const = default;
};

struct PhaseSummary {
  std::string request_id;
  std::vector<int> phases_executed;
  std::string path_label;

  bool operator==(const PhaseSummary&) const = default;
};

class MalformedPayload : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical JSON (schema "prov/1"): field order is fixed, absent optionals are
// omitted. These strings are the exact bytes that get base64-encoded.
std::string to_canonical_json(const ProvenanceRecord& record);
std::string to_canonical_json(const PhaseSummary& summary);
ProvenanceRecord record_from_json(std::string_view json);
PhaseSummary summary_from_json(std::string_view json);

std::string base64url_encode(std::string_view bytes);
/// Accepts padded and unpadded input; throws MalformedPayload on bad input.
std::string base64url_decode(std::string_view text);

struct EncodeResult {
  std::string html;
  /// Component ids of records with no matching element; those records are dropped.
  std::vector<std::string> dropped;
};

/// Inserts one `<input type="hidden" class="prov-meta" ...>` marker in front
/// of each record's element and one prov-summary marker before `</body>`
/// (or at the end when the document has no `</body>`).
EncodeResult encode_page(std::string_view html, const std::vector<ProvenanceRecord>& records,
                         const PhaseSummary& summary);

/// Removes every element classed prov-meta or prov-summary; all other bytes are kept.
std::string strip(std::string_view html);

struct DecodeErrorEntry {
  std::string data_for;
  std::string message;
};

struct DecodedPage {
  std::vector<ProvenanceRecord> records;
  std::optional<PhaseSummary> summary;
  std::vector<DecodeErrorEntry> errors;
  std::size_t marker_count = 0;
};

/// Reads every marker in document order. Bad payloads become error entries.
DecodedPage decode_page(std::string_view html);

/// Byte length of a prov-meta marker for the given id and payload.
std::size_t marker_size(std::string_view component_id, std::size_t payload_length);

}  // namespace pathtrace
