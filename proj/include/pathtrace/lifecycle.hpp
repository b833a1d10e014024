#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pathtrace/component.hpp"
#include "pathtrace/interception.hpp"
#include "pathtrace/provenance.hpp"
#include "pathtrace/template.hpp"

namespace pathtrace {

/// Lifecycle phase units, indexed by phase number - 1.
inline constexpr const char* kPhaseUnits[6] = {
    "demo.lifecycle.RestoreViewPhase",         "demo.lifecycle.ApplyRequestValuesPhase",
    "demo.lifecycle.ProcessValidationsPhase",  "demo.lifecycle.UpdateModelValuesPhase",
    "demo.lifecycle.InvokeApplicationPhase",   "demo.lifecycle.RenderResponsePhase",
};
inline constexpr const char* kPhaseNames[6] = {"Restore View",        "Apply Request Values", "Process Validations",
                                               "Update Model Values", "Invoke Application",   "Render Response"};

namespace units {
inline constexpr const char* kParamInterceptor = "demo.ajax.ParamInterceptor";
inline constexpr const char* kSpecialAjaxHandler = "demo.ajax.SpecialAjaxHandler";
inline constexpr const char* kDefaultAjaxHandler = "demo.ajax.DefaultAjaxHandler";
inline constexpr const char* kNavigationHandler = "demo.application.NavigationHandler";
inline constexpr const char* kStateManager = "demo.lifecycle.StateManager";
}  // namespace units

enum class HttpMethod { Get, Post };

using ParamList = std::vector<std::pair<std::string, std::string>>;

struct RequestEnvelope {
  HttpMethod method = HttpMethod::Get;
  bool ajax = false;
  std::string path;
  ParamList params;
  std::optional<std::string> session_id;
  std::string request_id;

  /// First value for `name`, or nullptr.
  const std::string* param(std::string_view name) const;
};

struct NavigationRule {
  std::string from_view;
  std::string outcome;
  std::string to_view;
};

class NavigationRules {
 public:
  /// Throws std::invalid_argument if (from_view, outcome) is already present.
  void add(NavigationRule rule);
  std::optional<std::string> find(std::string_view from_view, std::string_view outcome) const;
  std::size_t size() const { return rules_.size(); }

  /// One rule per line: `from_view<TAB>outcome<TAB>to_view`. `#` starts a comment line.
  static NavigationRules parse(std::string_view text);

 private:
  std::vector<NavigationRule> rules_;
};

struct ValidationFailure {
  std::string component_id;
  std::string unit;
  std::string message;
};

struct ValidatorRegistry {
  std::string required_unit = "demo.validator.RequiredValidator";
  std::string int_converter_unit = "demo.convert.IntegerConverter";
};

/// Runs `required="true"` and `converter="int"` checks over the tree. Failing
/// components get valid = false. Each check is a dispatch point.
std::vector<ValidationFailure> process_validations(std::vector<ComponentNode>& tree, const ValidatorRegistry& validators,
                                                   RequestContext* ctx);

struct ViewState {
  std::string view_id;
  View tree;
  std::string saved_at;
};

/// Session-scoped view states and model values. Every operation locks for the
/// duration of a single get or put.
class SessionStore {
 public:
  SessionStore();

  /// Issues a fresh 16-hex-character session id; ids are never reused.
  std::string create(ModelBag seed);
  bool contains(const std::string& session_id) const;

  void save(const std::string& session_id, const View& view, const std::string& request_id);
  std::optional<View> restore(const std::string& session_id, const std::string& view_id) const;
  std::optional<ViewState> state(const std::string& session_id, const std::string& view_id) const;

  ModelBag model(const std::string& session_id) const;
  void set_model(const std::string& session_id, ModelBag model);

  std::size_t size() const;

 private:
  struct Session {
    std::map<std::string, ViewState, std::less<>> views;
    ModelBag model;
    std::chrono::system_clock::time_point created_at;
  };

  mutable std::mutex mutex_;
  std::map<std::string, Session, std::less<>> sessions_;
  std::set<std::string> issued_;
  std::mt19937_64 rng_;
};

/// Deep copy of the saved tree for (session_id, view_id), if any.
std::optional<View> restore_view(const SessionStore& store, const std::string& session_id, const std::string& view_id);

/// Parsed templates plus everything needed to build views from them.
class Application {
 public:
  Application(ComponentRegistry registry, NavigationRules navigation, ModelBag model_seed,
              ValidatorRegistry validators = {});

  /// Parses and caches a page. `view_id` is its path relative to pages/.
  void add_page(const std::string& view_id, std::string_view text);
  const TemplateDocument* page(std::string_view view_id) const;
  std::vector<std::string> page_ids() const;

  const ComponentRegistry& registry() const { return registry_; }
  const NavigationRules& navigation() const { return navigation_; }
  const ModelBag& model_seed() const { return model_seed_; }
  const ValidatorRegistry& validators() const { return validators_; }

  /// Loads every `*.xhtml` under `pages_dir` (recursively) and the three config files.
  /// `model_file` may be empty.
  static Application load(const std::filesystem::path& pages_dir, const std::filesystem::path& components_file,
                          const std::filesystem::path& navigation_file, const std::filesystem::path& model_file);

 private:
  ComponentRegistry registry_;
  NavigationRules navigation_;
  ModelBag model_seed_;
  ValidatorRegistry validators_;
  std::map<std::string, TemplateDocument, std::less<>> pages_;
};

/// `/pages/form`, `form` and `form.xhtml` all name view `form.xhtml`.
/// Returns nullopt for paths that escape the pages directory.
std::optional<std::string> view_id_from_path(std::string_view path);

struct Instrumentation {
  bool enabled = false;
  std::shared_ptr<const BindingTable> bindings;
};

class LifecycleError : public std::runtime_error {
 public:
  enum class Kind { UnknownView, UnknownRenderTarget, MissingRenderParam, BadRequest };

  LifecycleError(Kind kind, const std::string& detail);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct PartialUpdate {
  std::string target_id;
  std::string html;
  std::string handled_by;
};

/// AJAX handler chain [ParamInterceptor, SpecialAjaxHandler, DefaultAjaxHandler].
/// The interceptor routes to the special handler when `param2` is present;
/// exactly one handler re-renders the `render` target.
PartialUpdate handle_ajax(const RequestEnvelope& env, View& view, const ComponentRegistry& registry, RequestContext* ctx);

struct Response {
  int status = 200;
  std::string content_type = "text/html; charset=utf-8";
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;

  std::string request_id;
  std::string session_id;
  /// View that was rendered (differs from the request path after navigation).
  std::string view_id;
  std::vector<int> phases;
  std::string path_label;
  PhaseTrace trace;
  std::vector<ProvenanceRecord> records;
  std::vector<std::string> violations;
  std::size_t event_count = 0;

  const std::string* header(std::string_view name) const;
};

/// Runs one request through the lifecycle:
///   GET                    → phases 1, 6
///   POST, validation fails → phases 1, 2, 3, 6 (same view, messages rendered)
///   POST, validation ok    → phases 1-6, navigation by the pressed button's action
///   AJAX POST              → phases 1-6, phase 6 answered by the AJAX handler chain
Response process_request(const RequestEnvelope& env, const Application& app, SessionStore& sessions,
                         const Instrumentation& instrumentation);

}  // namespace pathtrace
