#include "pathtrace/expression.hpp"

namespace pathtrace {

namespace {

bool is_ident(std::string_view s) {
  if (s.empty()) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    bool alpha = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    if (!(alpha || (i > 0 && c >= '0' && c <= '9'))) return false;
  }
  return true;
}

std::optional<ValueRef> parse_body(std::string_view body) {
  auto dot = body.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  auto bag = body.substr(0, dot);
  auto key = body.substr(dot + 1);
  if (!is_ident(bag) || !is_ident(key)) return std::nullopt;
  return ValueRef{std::string(bag), std::string(key)};
}

}  // namespace

std::optional<ValueRef> parse_value_reference(std::string_view expr) {
  if (expr.size() < 3 || expr.substr(0, 2) != "#{" || expr.back() != '}') return std::nullopt;
  return parse_body(expr.substr(2, expr.size() - 3));
}

std::string resolve_value_expression(std::string_view expr, const ModelBag& model, RequestContext* ctx,
                                     const ComponentNode* target) {
  std::string out;
  std::size_t pos = 0;
  while (pos < expr.size()) {
    auto open = expr.find("#{", pos);
    if (open == std::string_view::npos) {
      out.append(expr.substr(pos));
      break;
    }
    out.append(expr.substr(pos, open - pos));
    auto close = expr.find('}', open + 2);
    if (close == std::string_view::npos) {
      throw MalformedExpression("unterminated value expression in '" + std::string(expr) + "'");
    }
    auto ref = parse_body(expr.substr(open + 2, close - open - 2));
    if (!ref) throw MalformedExpression("expected #{bag.key} in '" + std::string(expr) + "'");

    DispatchPoint point{{kModelUnit, "get", 2, {"string", "string"}, "string"}, {ref->bag, ref->key}, target,
                        target ? std::optional(target->location) : std::nullopt};
    out += dispatch(ctx, point, [&] { return model.get(ref->bag, ref->key).value_or(std::string()); });
    pos = close + 1;
  }
  return out;
}

}  // namespace pathtrace
