#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pathtrace/component.hpp"

namespace pathtrace {

class MalformedExpression : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ValueRef {
  std::string bag;
  std::string key;

  bool operator==(const ValueRef&) const = default;
};

/// Returns the reference when `expr` is exactly `#{bag.key}`.
std::optional<ValueRef> parse_value_reference(std::string_view expr);

/// Literal text is returned as is; each `#{bag.key}` is replaced by the model
/// value (empty when absent). Every lookup is dispatched as
/// `{demo.model.ModelBag, get, 2}` on behalf of `target`, if given.
std::string resolve_value_expression(std::string_view expr, const ModelBag& model, RequestContext* ctx = nullptr,
                                     const ComponentNode* target = nullptr);

inline constexpr const char* kModelUnit = "demo.model.ModelBag";

}  // namespace pathtrace
