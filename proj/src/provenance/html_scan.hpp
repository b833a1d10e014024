#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "pathtrace/template.hpp"

namespace pathtrace::detail {

/// One start or end tag found by HtmlScanner. Offsets are byte positions in
/// the scanned text; `end` is one past the closing `>`.
struct ScannedTag {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string name;  // lower-cased
  AttributeList attributes;
  bool is_end = false;
  bool self_closing = false;

  const std::string* attribute(std::string_view key) const { return find_attribute(attributes, key); }
  bool has_class(std::string_view cls) const;
};

/// Forward-only tag scanner for generated HTML. Not a full HTML tokenizer:
/// comments, doctypes and processing instructions are skipped, and the bodies
/// of script/style elements are treated as opaque text.
class HtmlScanner {
 public:
  explicit HtmlScanner(std::string_view html, std::size_t start = 0) : html_(html), pos_(start) {}

  std::optional<ScannedTag> next();
  void seek(std::size_t pos) { pos_ = pos; }

 private:
  std::string_view html_;
  std::size_t pos_;
};

bool is_void_element(std::string_view name);
std::string html_unescape(std::string_view text);
std::string html_escape(std::string_view text);

}  // namespace pathtrace::detail
