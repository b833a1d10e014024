#include "pathtrace/template.hpp"

#include <algorithm>
#include <optional>

namespace pathtrace {

namespace {

bool is_name_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_name_char(char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool valid_file_name(std::string_view name) {
  if (name.empty()) return false;
  std::size_t start = 0;
  while (start <= name.size()) {
    auto end = name.find_first_of("/\\", start);
    if (end == std::string_view::npos) end = name.size();
    if (name.substr(start, end - start) == "..") return false;
    start = end + 1;
  }
  return true;
}

class Parser {
 public:
  Parser(std::string_view text, std::string file, const NamespaceSet& namespaces)
      : text_(text), file_(std::move(file)), namespaces_(namespaces) {
    line_index_.push_back(0);
    for (std::size_t i = 0; i < text_.size(); ++i) {
      if (text_[i] == '\n') line_index_.push_back(i + 1);
    }
  }

  TemplateDocument parse() {
    TemplateDocument doc;
    doc.root = parse_nodes(nullptr);
    doc.source_file = file_;
    doc.line_index = std::move(line_index_);
    return doc;
  }

 private:
  SourceLocation locate(std::size_t offset) const {
    auto it = std::upper_bound(line_index_.begin(), line_index_.end(), offset);
    auto line = static_cast<std::size_t>(it - line_index_.begin());
    return {file_, static_cast<int>(line), static_cast<int>(offset - line_index_[line - 1] + 1)};
  }

  [[noreturn]] void fail(TemplateError::Kind kind, std::size_t offset, const std::string& detail) const {
    throw TemplateError(kind, locate(offset), detail);
  }

  // Reads `prefix:name` starting at `at`; returns end offset or nullopt.
  std::optional<std::size_t> qualified_name_end(std::size_t at, std::string* ns, std::string* name) const {
    std::size_t i = at;
    if (i >= text_.size() || !is_name_start(text_[i])) return std::nullopt;
    while (i < text_.size() && is_name_char(text_[i]) && text_[i] != '.') ++i;
    if (i >= text_.size() || text_[i] != ':') return std::nullopt;
    std::size_t colon = i++;
    if (i >= text_.size() || !is_name_start(text_[i])) return std::nullopt;
    while (i < text_.size() && is_name_char(text_[i])) ++i;
    if (ns) *ns = std::string(text_.substr(at, colon - at));
    if (name) *name = std::string(text_.substr(colon + 1, i - colon - 1));
    return i;
  }

  // Skips over markup the engine passes through; returns the end offset.
  std::size_t skip_raw_markup(std::size_t lt) const {
    if (text_.compare(lt, 4, "<!--") == 0) {
      auto end = text_.find("-->", lt + 4);
      return end == std::string_view::npos ? text_.size() : end + 3;
    }
    std::size_t i = lt + 1;
    if (i >= text_.size()) return i;
    char c = text_[i];
    if (!(is_name_start(c) || c == '/' || c == '!' || c == '?')) return i;
    char quote = 0;
    for (; i < text_.size(); ++i) {
      char ch = text_[i];
      if (quote) {
        if (ch == quote) quote = 0;
      } else if (ch == '"' || ch == '\'') {
        quote = ch;
      } else if (ch == '>') {
        return i + 1;
      }
    }
    return text_.size();
  }

  std::vector<TemplateNode> parse_nodes(TagNode* open) {
    std::vector<TemplateNode> out;
    std::string pending;
    auto flush = [&] {
      if (!pending.empty()) {
        out.push_back(TemplateNode{TextRun{std::move(pending)}});
        pending.clear();
      }
    };

    while (pos_ < text_.size()) {
      auto lt = text_.find('<', pos_);
      if (lt == std::string_view::npos) {
        pending.append(text_.substr(pos_));
        pos_ = text_.size();
        break;
      }
      pending.append(text_.substr(pos_, lt - pos_));
      pos_ = lt;

      std::string ns;
      std::string name;
      if (lt + 1 < text_.size() && text_[lt + 1] == '/') {
        if (auto end = qualified_name_end(lt + 2, &ns, &name)) {
          std::size_t i = *end;
          while (i < text_.size() && is_space(text_[i])) ++i;
          if (i >= text_.size() || text_[i] != '>') fail(TemplateError::Kind::MalformedTag, lt, "malformed end tag");
          if (open == nullptr) fail(TemplateError::Kind::UnexpectedCloseTag, lt, "</" + ns + ":" + name + "> has no open tag");
          if (open->ns != ns || open->tag != name) {
            throw TemplateError(TemplateError::Kind::UnclosedTag, open->location,
                                "<" + open->qualified_name() + "> closed by </" + ns + ":" + name + ">");
          }
          flush();
          open->close_text = std::string(text_.substr(lt, i + 1 - lt));
          pos_ = i + 1;
          return out;
        }
      } else if (auto end = qualified_name_end(lt + 1, &ns, &name)) {
        if (!namespaces_.contains(ns)) fail(TemplateError::Kind::BadNamespace, lt, "namespace '" + ns + "' is not registered");
        flush();
        out.push_back(TemplateNode{parse_tag(lt, *end, std::move(ns), std::move(name))});
        continue;
      }

      auto end = skip_raw_markup(lt);
      pending.append(text_.substr(lt, end - lt));
      pos_ = end;
    }

    if (open != nullptr) {
      throw TemplateError(TemplateError::Kind::UnclosedTag, open->location, "<" + open->qualified_name() + "> is never closed");
    }
    flush();
    return out;
  }

  TagNode parse_tag(std::size_t lt, std::size_t name_end, std::string ns, std::string name) {
    TagNode node;
    node.ns = std::move(ns);
    node.tag = std::move(name);
    node.location = locate(lt);

    std::size_t i = name_end;
    for (;;) {
      std::size_t before_space = i;
      while (i < text_.size() && is_space(text_[i])) ++i;
      if (i >= text_.size()) fail(TemplateError::Kind::UnclosedTag, lt, "start tag runs to end of input");
      if (text_[i] == '>') {
        ++i;
        break;
      }
      if (text_.compare(i, 2, "/>") == 0) {
        i += 2;
        node.self_closing = true;
        break;
      }
      if (i == before_space || !is_name_start(text_[i])) fail(TemplateError::Kind::MalformedTag, i, "expected attribute name");

      std::size_t attr_start = i;
      while (i < text_.size() && (is_name_char(text_[i]) || text_[i] == ':')) ++i;
      std::string attr(text_.substr(attr_start, i - attr_start));
      while (i < text_.size() && is_space(text_[i])) ++i;
      if (i >= text_.size() || text_[i] != '=') fail(TemplateError::Kind::MalformedTag, i, "expected '=' after " + attr);
      ++i;
      while (i < text_.size() && is_space(text_[i])) ++i;
      if (i >= text_.size() || (text_[i] != '"' && text_[i] != '\'')) fail(TemplateError::Kind::MalformedTag, i, "attribute value must be quoted");
      char quote = text_[i++];
      auto close = text_.find(quote, i);
      if (close == std::string_view::npos) fail(TemplateError::Kind::UnclosedTag, lt, "unterminated attribute value");
      if (find_attribute(node.attributes, attr) != nullptr) fail(TemplateError::Kind::DuplicateAttribute, attr_start, "duplicate attribute '" + attr + "'");
      node.attributes.emplace_back(std::move(attr), std::string(text_.substr(i, close - i)));
      i = close + 1;
    }

    node.open_text = std::string(text_.substr(lt, i - lt));
    pos_ = i;
    if (!node.self_closing) node.children = parse_nodes(&node);
    return node;
  }

  std::string_view text_;
  std::string file_;
  const NamespaceSet& namespaces_;
  std::vector<std::size_t> line_index_;
  std::size_t pos_ = 0;
};

void serialize_nodes(const std::vector<TemplateNode>& nodes, std::string& out) {
  for (const auto& node : nodes) {
    if (node.is_tag()) {
      const auto& tag = node.tag();
      out += tag.open_text;
      serialize_nodes(tag.children, out);
      out += tag.close_text;
    } else {
      out += node.text().text;
    }
  }
}

}  // namespace

const std::string* find_attribute(const AttributeList& attrs, std::string_view name) {
  for (const auto& [key, value] : attrs) {
    if (key == name) return &value;
  }
  return nullptr;
}

std::size_t TemplateDocument::offset_of(const SourceLocation& loc) const {
  return line_index.at(static_cast<std::size_t>(loc.line - 1)) + static_cast<std::size_t>(loc.column - 1);
}

TemplateError::TemplateError(Kind kind, SourceLocation where, const std::string& detail)
    : std::runtime_error(where.file + ":" + std::to_string(where.line) + ":" + std::to_string(where.column) + ": " +
                         to_string(kind) + ": " + detail),
      kind_(kind),
      where_(std::move(where)) {}

const char* to_string(TemplateError::Kind kind) {
  switch (kind) {
    case TemplateError::Kind::UnclosedTag: return "UnclosedTag";
    case TemplateError::Kind::DuplicateAttribute: return "DuplicateAttribute";
    case TemplateError::Kind::BadNamespace: return "BadNamespace";
    case TemplateError::Kind::MalformedTag: return "MalformedTag";
    case TemplateError::Kind::UnexpectedCloseTag: return "UnexpectedCloseTag";
  }
  return "TemplateError";
}

TemplateDocument parse_template(std::string_view text, std::string_view file_name, const NamespaceSet& namespaces) {
  if (!valid_file_name(file_name)) throw std::invalid_argument("template file name must be non-empty and free of '..'");
  return Parser(text, std::string(file_name), namespaces).parse();
}

std::string serialize(const TemplateDocument& doc) {
  std::string out;
  serialize_nodes(doc.root, out);
  return out;
}

}  // namespace pathtrace
