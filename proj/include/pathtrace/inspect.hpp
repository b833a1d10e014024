#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pathtrace/provenance.hpp"

namespace pathtrace {

struct AttributeView {
  std::string name;
  std::string value;
  std::string set_by;
  int line = 0;

  bool operator==(const AttributeView&) const = default;
};

/// What the inspector shows for one element: the Attributes and Server Path
/// views plus editor-openable `file:line` locations.
struct InspectionReport {
  std::string component_id;
  std::string tag;
  std::vector<AttributeView> attributes;
  std::vector<ServerPathEntry> server_path;
  std::vector<std::string> locations;
  std::optional<PhaseSummary> summary;
  /// Set when the element's marker could not be decoded.
  std::optional<std::string> decode_error;

  bool operator==(const InspectionReport&) const = default;
};

class InspectError : public std::runtime_error {
 public:
  enum class Kind { NoProvenance, NoSuchComponent };

  InspectError(Kind kind, const std::string& message);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Selector {
  enum class Kind { Id, Tag };
  Kind kind = Kind::Id;
  std::string value;
};

/// `tag=ui:inputText` selects by tag, anything else is an element id.
Selector parse_selector(std::string_view text);

/// `pages/<file>:<line>`
std::string format_location(const SourceLocation& loc);

InspectionReport make_report(const ProvenanceRecord& record, const std::optional<PhaseSummary>& summary);

/// Id selectors yield exactly one report, tag selectors every match in
/// document order. Throws NoProvenance for pages without markers and
/// NoSuchComponent when nothing matches.
std::vector<InspectionReport> inspect(const DecodedPage& page, const Selector& selector);
std::vector<InspectionReport> inspect(std::string_view html, const Selector& selector);

struct ComponentRow {
  std::string id;
  std::string tag;
  std::string location;

  bool operator==(const ComponentRow&) const = default;
};

std::vector<ComponentRow> list_components(const DecodedPage& page);
std::vector<ComponentRow> list_components(std::string_view html);

enum class OutputFormat { Text, Json };

std::string to_canonical_json(const InspectionReport& report);
InspectionReport report_from_json(std::string_view json);

/// Text: one location per line. Json: the canonical report plus a newline.
std::string emit_locations(const InspectionReport& report, OutputFormat format);

/// Reads a local file, or fetches `http://host[:port]/path`.
std::string load_source(const std::string& source);

}  // namespace pathtrace
