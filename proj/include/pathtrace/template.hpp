#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace pathtrace {

/// Position inside a template file. `file` is relative to the app's pages/ directory.
struct SourceLocation {
  std::string file;
  int line = 1;
  int column = 1;

  bool operator==(const SourceLocation&) const = default;
};

/// Ordered attribute list; names are unique within one tag.
using AttributeList = std::vector<std::pair<std::string, std::string>>;

const std::string* find_attribute(const AttributeList& attrs, std::string_view name);

struct TemplateNode;

/// A namespaced tag such as `<ui:inputText id="n"/>`.
///
/// `open_text` and `close_text` hold the exact source bytes of the start and
/// end tag so the document can be re-serialized byte-for-byte. For a
/// self-closing tag `close_text` is empty.
struct TagNode {
  std::string ns;
  std::string tag;
  AttributeList attributes;
  std::vector<TemplateNode> children;
  SourceLocation location;
  std::string open_text;
  std::string close_text;
  bool self_closing = false;

  std::string qualified_name() const { return ns + ":" + tag; }
  const std::string* attribute(std::string_view name) const { return find_attribute(attributes, name); }
};

/// Markup the engine does not interpret (plain HTML, text, comments).
struct TextRun {
  std::string text;
};

struct TemplateNode {
  std::variant<TextRun, TagNode> value;

  bool is_tag() const { return std::holds_alternative<TagNode>(value); }
  const TagNode& tag() const { return std::get<TagNode>(value); }
  TagNode& tag() { return std::get<TagNode>(value); }
  const TextRun& text() const { return std::get<TextRun>(value); }
};

struct TemplateDocument {
  std::vector<TemplateNode> root;
  std::string source_file;
  /// line_index[i] is the byte offset where line i + 1 starts.
  std::vector<std::size_t> line_index;

  std::size_t offset_of(const SourceLocation& loc) const;
};

using NamespaceSet = std::set<std::string, std::less<>>;

class TemplateError : public std::runtime_error {
 public:
  enum class Kind { UnclosedTag, DuplicateAttribute, BadNamespace, MalformedTag, UnexpectedCloseTag };

  TemplateError(Kind kind, SourceLocation where, const std::string& detail);

  Kind kind() const { return kind_; }
  const SourceLocation& where() const { return where_; }

 private:
  Kind kind_;
  SourceLocation where_;
};

const char* to_string(TemplateError::Kind kind);

/// Parses a template. Only tags whose prefix is in `namespaces` are
/// interpreted; every other byte is kept as a raw text run.
TemplateDocument parse_template(std::string_view text, std::string_view file_name,
                                const NamespaceSet& namespaces = {"ui"});

/// Inverse of parse_template: reproduces the original text.
std::string serialize(const TemplateDocument& doc);

/// Depth-first pre-order visit of every tag in the document.
template <class F>
void for_each_tag(const std::vector<TemplateNode>& nodes, F&& fn) {
  for (const auto& node : nodes) {
    if (!node.is_tag()) continue;
    fn(node.tag());
    for_each_tag(node.tag().children, fn);
  }
}

}  // namespace pathtrace
