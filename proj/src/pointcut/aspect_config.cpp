#include "pathtrace/aspect_config.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace pathtrace {

namespace {

using nlohmann::json;

int line_of(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line on which the n-th binding's pointcut string appears, for diagnostics.
int binding_line(std::string_view text, const std::string& pointcut) {
  auto at = text.find(pointcut);
  return at == std::string_view::npos ? 0 : line_of(text, at);
}

const json& require(const json& obj, const char* key, int line) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(ConfigError::Kind::SyntaxError, line, std::string("missing field '") + key + "'");
  }
  return obj.at(key);
}

std::string require_string(const json& obj, const char* key, int line) {
  const auto& v = require(obj, key, line);
  if (!v.is_string() || v.get_ref<const std::string&>().empty()) {
    throw ConfigError(ConfigError::Kind::SyntaxError, line, std::string("field '") + key + "' must be a non-empty string");
  }
  return v.get<std::string>();
}

}  // namespace

ConfigError::ConfigError(Kind kind, int line, const std::string& detail)
    : std::runtime_error(std::string(kind == Kind::SyntaxError ? "SyntaxError" : "UnknownAdviceName") +
                         (line > 0 ? " at line " + std::to_string(line) : std::string()) + ": " + detail),
      kind_(kind),
      line_(line) {}

AspectConfig load_aspect_config(std::string_view text) {
  AspectConfig config;
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return config;

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::SyntaxError, line_of(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
  }
  if (!doc.is_object()) throw ConfigError(ConfigError::Kind::SyntaxError, 1, "top level must be an object");

  if (doc.contains("aspects")) {
    const auto& aspects = doc.at("aspects");
    if (!aspects.is_array()) throw ConfigError(ConfigError::Kind::SyntaxError, 1, "'aspects' must be an array");
    for (const auto& a : aspects) {
      if (!a.is_string()) throw ConfigError(ConfigError::Kind::SyntaxError, 1, "aspect entries must be strings");
      auto name = a.get<std::string>();
      if (std::find(config.aspects.begin(), config.aspects.end(), name) == config.aspects.end()) {
        config.aspects.push_back(std::move(name));
      }
    }
  }

  if (doc.contains("bindings")) {
    const auto& bindings = doc.at("bindings");
    if (!bindings.is_array()) throw ConfigError(ConfigError::Kind::SyntaxError, 1, "'bindings' must be an array");
    for (const auto& b : bindings) {
      std::string pointcut_text = b.is_object() && b.contains("pointcut") && b.at("pointcut").is_string()
                                      ? b.at("pointcut").get<std::string>()
                                      : std::string();
      int line = pointcut_text.empty() ? 1 : binding_line(text, pointcut_text);
      Binding binding;
      try {
        binding.pointcut = parse_pointcut(require_string(b, "pointcut", line));
      } catch (const PointcutError& e) {
        throw ConfigError(ConfigError::Kind::SyntaxError, line, e.what());
      }
      binding.advice = require_string(b, "advice", line);
      binding.aspect = require_string(b, "aspect", line);
      if (std::find(config.bindings.begin(), config.bindings.end(), binding) == config.bindings.end()) {
        config.bindings.push_back(std::move(binding));
      }
    }
  }
  return config;
}

std::string dump_aspect_config(const AspectConfig& config) {
  nlohmann::ordered_json doc;
  doc["aspects"] = config.aspects;
  doc["bindings"] = nlohmann::ordered_json::array();
  for (const auto& b : config.bindings) {
    doc["bindings"].push_back({{"pointcut", to_string(b.pointcut)}, {"advice", b.advice}, {"aspect", b.aspect}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace pathtrace
