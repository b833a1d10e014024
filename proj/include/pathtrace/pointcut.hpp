#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pathtrace {

/// An identifiable executable point: unit path + method + arity.
///
/// `arg_types` and `return_type` are optional refinements; when empty the
/// corresponding pattern only matches if it is a bare wildcard.
struct JoinPointId {
  std::string type_path;
  std::string method;
  std::size_t arity = 0;
  std::vector<std::string> arg_types;
  std::string return_type;

  bool operator==(const JoinPointId&) const = default;
};

struct ArgsPattern {
  enum class Kind { Any, List };
  Kind kind = Kind::Any;
  /// Positional type globs when kind == List; empty list means `()`.
  std::vector<std::string> types;

  bool operator==(const ArgsPattern&) const = default;
};

/// `execution(<ret> <type>-><method>(<args>))`
struct PointcutExpr {
  std::string return_pattern;
  std::string type_pattern;
  std::string method_pattern;
  ArgsPattern args;

  bool operator==(const PointcutExpr&) const = default;
};

class PointcutError : public std::runtime_error {
 public:
  enum class Kind { SyntaxError, UnsupportedKind };

  PointcutError(Kind kind, std::size_t offset, const std::string& detail);

  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

PointcutExpr parse_pointcut(std::string_view text);

/// Canonical text form; parse_pointcut(to_string(e)) == e.
std::string to_string(const PointcutExpr& expr);

/// Glob over a single identifier: `*` matches any run of identifier characters.
bool match_name_glob(std::string_view pattern, std::string_view name);

/// Glob over a dotted unit path. Interior `*` stays within one segment; a
/// trailing `*` also swallows any further segments.
bool match_type_glob(std::string_view pattern, std::string_view type_path);

bool matches(const PointcutExpr& expr, const JoinPointId& jp);

}  // namespace pathtrace
