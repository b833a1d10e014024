#include "pathtrace/pointcut.hpp"

namespace pathtrace {

namespace {

bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '$';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

class PointcutParser {
 public:
  explicit PointcutParser(std::string_view text) : text_(text) {}

  PointcutExpr parse() {
    skip_space();
    std::size_t kind_start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    auto kind = text_.substr(kind_start, pos_ - kind_start);
    if (kind.empty()) fail(kind_start, "expected pointcut kind");
    if (kind != "execution") {
      throw PointcutError(PointcutError::Kind::UnsupportedKind, kind_start,
                          "pointcut kind '" + std::string(kind) + "' is not supported; only execution");
    }
    skip_space();
    expect('(');
    skip_space();

    PointcutExpr expr;
    expr.return_pattern = glob(true);
    if (pos_ >= text_.size() || !is_space(text_[pos_])) fail(pos_, "expected whitespace after return pattern");
    skip_space();
    expr.type_pattern = glob(true);
    skip_space();
    if (text_.compare(pos_, 2, "->") != 0) fail(pos_, "expected '->'");
    pos_ += 2;
    skip_space();
    expr.method_pattern = glob(false);
    skip_space();
    expect('(');
    skip_space();
    expr.args = args();
    skip_space();
    expect(')');
    skip_space();
    expect(')');
    skip_space();
    if (pos_ != text_.size()) fail(pos_, "trailing characters");
    return expr;
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& detail) const {
    throw PointcutError(PointcutError::Kind::SyntaxError, at, detail);
  }

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string glob(bool dotted) {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (is_ident_char(c) || c == '*') {
        ++pos_;
      } else if (dotted && c == '.') {
        // `..` only appears as the any-args marker, never inside a glob.
        if (pos_ == start || text_[pos_ - 1] == '.' || pos_ + 1 >= text_.size() || text_[pos_ + 1] == '.') {
          fail(pos_, "empty segment in pattern");
        }
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail(start, "expected pattern");
    auto g = text_.substr(start, pos_ - start);
    if (g.back() == '.') fail(pos_ - 1, "pattern ends with '.'");
    return std::string(g);
  }

  ArgsPattern args() {
    ArgsPattern out;
    if (text_.compare(pos_, 2, "..") == 0) {
      pos_ += 2;
      out.kind = ArgsPattern::Kind::Any;
      return out;
    }
    out.kind = ArgsPattern::Kind::List;
    if (pos_ < text_.size() && text_[pos_] == ')') return out;
    for (;;) {
      out.types.push_back(glob(true));
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        skip_space();
        continue;
      }
      return out;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Wildcard match within one segment: `*` spans any run of characters.
bool match_segment(std::string_view pattern, std::string_view name) {
  std::size_t p = 0, n = 0;
  std::size_t star = std::string_view::npos, resume = 0;
  while (n < name.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      resume = n;
    } else if (p < pattern.size() && pattern[p] == name[n]) {
      ++p;
      ++n;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      n = ++resume;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

std::vector<std::string_view> split_dots(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto dot = s.find('.', start);
    if (dot == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, dot - start));
    start = dot + 1;
  }
}

bool all_ident(std::string_view s) {
  for (char c : s) {
    if (!is_ident_char(c)) return false;
  }
  return true;
}

}  // namespace

PointcutError::PointcutError(Kind kind, std::size_t offset, const std::string& detail)
    : std::runtime_error((kind == Kind::SyntaxError ? "SyntaxError at offset " : "UnsupportedKind at offset ") +
                         std::to_string(offset) + ": " + detail),
      kind_(kind),
      offset_(offset) {}

PointcutExpr parse_pointcut(std::string_view text) { return PointcutParser(text).parse(); }

std::string to_string(const PointcutExpr& expr) {
  std::string out = "execution(" + expr.return_pattern + " " + expr.type_pattern + "->" + expr.method_pattern + "(";
  if (expr.args.kind == ArgsPattern::Kind::Any) {
    out += "..";
  } else {
    for (std::size_t i = 0; i < expr.args.types.size(); ++i) {
      if (i) out += ", ";
      out += expr.args.types[i];
    }
  }
  out += "))";
  return out;
}

bool match_name_glob(std::string_view pattern, std::string_view name) {
  if (!all_ident(name)) return false;
  return match_segment(pattern, name);
}

bool match_type_glob(std::string_view pattern, std::string_view type_path) {
  if (pattern.empty() || type_path.empty()) return false;
  auto pats = split_dots(pattern);
  auto segs = split_dots(type_path);
  for (auto seg : segs) {
    if (seg.empty() || !all_ident(seg)) return false;
  }

  bool terminal = pattern.back() == '*';
  if (!terminal) {
    if (pats.size() != segs.size()) return false;
  } else if (segs.size() < pats.size()) {
    return false;
  }
  // With a terminal star the last pattern segment only has to match a prefix
  // of its candidate segment; later segments are absorbed by the star.
  for (std::size_t i = 0; i < pats.size(); ++i) {
    if (!match_segment(pats[i], segs[i])) return false;
  }
  return true;
}

bool matches(const PointcutExpr& expr, const JoinPointId& jp) {
  if (expr.return_pattern != "*") {
    if (jp.return_type.empty() || !match_type_glob(expr.return_pattern, jp.return_type)) return false;
  }
  if (!match_type_glob(expr.type_pattern, jp.type_path)) return false;
  if (!match_name_glob(expr.method_pattern, jp.method)) return false;
  if (expr.args.kind == ArgsPattern::Kind::Any) return true;
  if (expr.args.types.size() != jp.arity) return false;
  for (std::size_t i = 0; i < jp.arity; ++i) {
    const auto& glob = expr.args.types[i];
    if (glob == "*") continue;
    if (jp.arg_types.size() != jp.arity) return false;
    if (!match_type_glob(glob, jp.arg_types[i])) return false;
  }
  return true;
}

}  // namespace pathtrace
