#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pathtrace/pointcut.hpp"

namespace pathtrace {

struct Binding {
  PointcutExpr pointcut;
  std::string advice;
  std::string aspect;

  bool operator==(const Binding&) const = default;
};

/// In-memory form of aspects.json:
///
///   {"aspects": ["pathtrace.advices.ComponentAdvice", ...],
///    "bindings": [{"pointcut": "execution(...)", "advice": "setter",
///                  "aspect": "pathtrace.advices.ComponentAdvice"}, ...]}
///
/// Binding order is significant: it is the order advices wrap a join point.
struct AspectConfig {
  std::vector<std::string> aspects;
  std::vector<Binding> bindings;
};

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { SyntaxError, UnknownAdviceName };

  ConfigError(Kind kind, int line, const std::string& detail);

  Kind kind() const { return kind_; }
  /// 1-based line of the offending text, 0 when not applicable.
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

/// Parses aspects.json. Duplicate aspects and identical bindings collapse to
/// their first occurrence. An empty or whitespace-only document yields an
/// empty config.
AspectConfig load_aspect_config(std::string_view text);

std::string dump_aspect_config(const AspectConfig& config);

}  // namespace pathtrace
