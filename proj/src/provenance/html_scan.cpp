#include "html_scan.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace pathtrace::detail {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from) {
  auto it = std::search(hay.begin() + static_cast<std::ptrdiff_t>(std::min(from, hay.size())), hay.end(), needle.begin(),
                        needle.end(), [](char a, char b) {
                          return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
                        });
  return it == hay.end() ? std::string_view::npos : static_cast<std::size_t>(it - hay.begin());
}

}  // namespace

bool ScannedTag::has_class(std::string_view cls) const {
  const auto* value = attribute("class");
  if (value == nullptr) return false;
  std::string_view v = *value;
  std::size_t i = 0;
  while (i < v.size()) {
    while (i < v.size() && is_space(v[i])) ++i;
    std::size_t start = i;
    while (i < v.size() && !is_space(v[i])) ++i;
    if (v.substr(start, i - start) == cls) return true;
  }
  return false;
}

std::optional<ScannedTag> HtmlScanner::next() {
  while (pos_ < html_.size()) {
    auto lt = html_.find('<', pos_);
    if (lt == std::string_view::npos) {
      pos_ = html_.size();
      return std::nullopt;
    }
    if (html_.compare(lt, 4, "<!--") == 0) {
      auto end = html_.find("-->", lt + 4);
      pos_ = end == std::string_view::npos ? html_.size() : end + 3;
      continue;
    }
    if (lt + 1 < html_.size() && (html_[lt + 1] == '!' || html_[lt + 1] == '?')) {
      auto end = html_.find('>', lt);
      pos_ = end == std::string_view::npos ? html_.size() : end + 1;
      continue;
    }

    ScannedTag tag;
    tag.begin = lt;
    std::size_t i = lt + 1;
    if (i < html_.size() && html_[i] == '/') {
      tag.is_end = true;
      ++i;
    }
    if (i >= html_.size() || !is_alpha(html_[i])) {
      pos_ = lt + 1;
      continue;
    }
    std::size_t name_start = i;
    while (i < html_.size() && !is_space(html_[i]) && html_[i] != '>' && html_[i] != '/') ++i;
    tag.name = lower(html_.substr(name_start, i - name_start));

    bool closed = false;
    while (i < html_.size()) {
      while (i < html_.size() && is_space(html_[i])) ++i;
      if (i >= html_.size()) break;
      if (html_[i] == '>') {
        ++i;
        closed = true;
        break;
      }
      if (html_[i] == '/' && i + 1 < html_.size() && html_[i + 1] == '>') {
        tag.self_closing = true;
        i += 2;
        closed = true;
        break;
      }
      if (html_[i] == '/') {
        ++i;
        continue;
      }
      std::size_t attr_start = i;
      while (i < html_.size() && !is_space(html_[i]) && html_[i] != '=' && html_[i] != '>' &&
             !(html_[i] == '/' && i + 1 < html_.size() && html_[i + 1] == '>')) {
        ++i;
      }
      std::string key = lower(html_.substr(attr_start, i - attr_start));
      std::string value;
      std::size_t j = i;
      while (j < html_.size() && is_space(html_[j])) ++j;
      if (j < html_.size() && html_[j] == '=') {
        ++j;
        while (j < html_.size() && is_space(html_[j])) ++j;
        if (j < html_.size() && (html_[j] == '"' || html_[j] == '\'')) {
          char q = html_[j];
          auto close = html_.find(q, j + 1);
          if (close == std::string_view::npos) close = html_.size();
          value = html_unescape(html_.substr(j + 1, close - j - 1));
          i = std::min(close + 1, html_.size());
        } else {
          std::size_t v = j;
          while (j < html_.size() && !is_space(html_[j]) && html_[j] != '>') ++j;
          value = html_unescape(html_.substr(v, j - v));
          i = j;
        }
      }
      if (!key.empty() && find_attribute(tag.attributes, key) == nullptr) tag.attributes.emplace_back(std::move(key), std::move(value));
    }
    tag.end = closed ? i : html_.size();
    pos_ = tag.end;

    if (!tag.is_end && !tag.self_closing && (tag.name == "script" || tag.name == "style")) {
      auto close = find_ci(html_, "</" + tag.name, pos_);
      pos_ = close == std::string_view::npos ? html_.size() : close;
    }
    return tag;
  }
  return std::nullopt;
}

bool is_void_element(std::string_view name) {
  static constexpr std::array<std::string_view, 14> kVoid = {"area", "base", "br",   "col",   "embed",  "hr",    "img",
                                                             "input", "link", "meta", "param", "source", "track", "wbr"};
  return std::find(kVoid.begin(), kVoid.end(), name) != kVoid.end();
}

std::string html_unescape(std::string_view text) {
  if (text.find('&') == std::string_view::npos) return std::string(text);
  static constexpr std::array<std::pair<std::string_view, char>, 6> kEntities = {
      {{"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&#39;", '\''}, {"&apos;", '\''}}};
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    bool replaced = false;
    if (text[i] == '&') {
      for (const auto& [entity, ch] : kEntities) {
        if (text.compare(i, entity.size(), entity) == 0) {
          out += ch;
          i += entity.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += text[i++];
  }
  return out;
}

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace pathtrace::detail
