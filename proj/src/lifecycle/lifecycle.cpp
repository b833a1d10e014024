#include "pathtrace/lifecycle.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "pathtrace/expression.hpp"

namespace pathtrace {

namespace {

bool is_integer(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string label_of(const ComponentNode& node) {
  const auto* label = node.attribute("label");
  return label && !label->empty() ? *label : node.id;
}

bool attr_is(const ComponentNode& node, std::string_view name, std::string_view value) {
  const auto* v = node.attribute(name);
  return v != nullptr && *v == value;
}

std::string sanitize_header(std::string value) {
  std::replace_if(value.begin(), value.end(), [](char c) { return c == '\r' || c == '\n'; }, ' ');
  return value;
}

class RequestRun {
 public:
  RequestRun(const RequestEnvelope& env, const Application& app, SessionStore& sessions, const Instrumentation& instr)
      : env_(env), app_(app), sessions_(sessions) {
    ctx_.request_id = env.request_id;
    ctx_.enabled = instr.enabled;
    ctx_.bindings = instr.bindings;
  }

  Response run() {
    auto view_id = view_id_from_path(env_.path);
    const TemplateDocument* doc = view_id ? app_.page(*view_id) : nullptr;
    if (doc == nullptr) throw LifecycleError(LifecycleError::Kind::UnknownView, env_.path);
    if (env_.ajax && env_.method != HttpMethod::Post) throw LifecycleError(LifecycleError::Kind::BadRequest, "AJAX requests must be POST");
    if (env_.ajax && env_.param("render") == nullptr) throw LifecycleError(LifecycleError::Kind::MissingRenderParam, "AJAX request without render parameter");

    if (env_.session_id && sessions_.contains(*env_.session_id)) {
      session_id_ = *env_.session_id;
    } else {
      session_id_ = sessions_.create(app_.model_seed());
    }
    ctx_.session_id = session_id_;
    model_ = sessions_.model(session_id_);

    if (env_.method == HttpMethod::Get) {
      run_initial(*doc);
    } else if (env_.ajax) {
      run_ajax(*doc);
    } else {
      run_postback(*doc);
    }

    sessions_.set_model(session_id_, model_);
    sessions_.save(session_id_, view_, env_.request_id);
    return finish();
  }

 private:
  template <class F>
  void phase(int number, F&& body) {
    ctx_.current_phase = number;
    phases_.push_back(number);
    DispatchPoint point{{kPhaseUnits[number - 1], "execute", 1, {"FacesContext"}, "void"},
                        {OpaqueArg{"FacesContext"}},
                        nullptr,
                        std::nullopt};
    dispatch(&ctx_, point, body);
  }

  void build_fresh(const TemplateDocument& doc) { view_ = build_view(doc, app_.registry(), &ctx_, &model_); }

  bool restore(const std::string& view_id) {
    auto restored = sessions_.restore(session_id_, view_id);
    if (!restored) return false;
    view_ = std::move(*restored);
    for_each_component(view_.roots, [&](ComponentNode& node) {
      node.messages.clear();
      DispatchPoint point{{node.type_path, "restoreState", 1, {"Object"}, "void"}, {view_id}, &node, node.location};
      dispatch(&ctx_, point, [] {});
    });
    return true;
  }

  void render_page(const TemplateDocument& doc) { html_ = render_view(doc, view_, app_.registry(), &ctx_); }

  void run_initial(const TemplateDocument& doc) {
    phase(1, [&] { build_fresh(doc); });
    phase(6, [&] { render_page(doc); });
    label_ = "GET-initial";
  }

  void apply_request_values() {
    for_each_component(view_.roots, [&](ComponentNode& node) {
      const auto* spec = app_.registry().find_by_type(node.type_path);
      if (spec == nullptr || !spec->editable) return;
      node.valid = true;
      const auto* submitted = env_.param(node.id);
      if (submitted == nullptr) return;
      DispatchPoint point{{node.type_path, "setSubmittedValue", 1, {"string"}, "void"}, {*submitted}, &node, node.location};
      dispatch(&ctx_, point, [&] { node.value = *submitted; });
      submitted_.insert(node.id);
    });
  }

  void report_failures(const std::vector<ValidationFailure>& failures) {
    for_each_component(view_.roots, [&](ComponentNode& node) {
      if (node.tag != app_.registry().ns() + ":messages") return;
      for (const auto& f : failures) {
        DispatchPoint point{{node.type_path, "addMessage", 1, {"string"}, "void"}, {f.message}, &node, node.location};
        dispatch(&ctx_, point, [&] { node.messages.push_back(f.message); });
      }
    });
  }

  void update_model_values() {
    for_each_component(view_.roots, [&](ComponentNode& node) {
      const auto* spec = app_.registry().find_by_type(node.type_path);
      const auto* expr = node.attribute("value");
      if (spec == nullptr || !spec->editable || expr == nullptr || !submitted_.contains(node.id)) return;
      auto ref = parse_value_reference(*expr);
      if (!ref) return;
      DispatchPoint point{{kModelUnit, "put", 3, {"string", "string", "string"}, "void"},
                          {ref->bag, ref->key, node.value},
                          &node,
                          node.location};
      dispatch(&ctx_, point, [&] { model_.put(ref->bag, ref->key, node.value); });
    });
  }

  // Returns the target view id when the pressed button's action has a rule.
  std::optional<std::string> invoke_application(const std::string& view_id) {
    std::optional<std::string> target;
    for_each_component(view_.roots, [&](ComponentNode& node) {
      if (target || node.tag != app_.registry().ns() + ":commandButton" || env_.param(node.id) == nullptr) return;
      const auto* action = node.attribute("action");
      if (action == nullptr) return;
      DispatchPoint point{{units::kNavigationHandler, "handleNavigation", 2, {"string", "string"}, "string"},
                          {view_id, *action},
                          &node,
                          node.location};
      auto to = dispatch(&ctx_, point, [&] { return app_.navigation().find(view_id, *action).value_or(std::string()); });
      if (!to.empty()) target = to;
    });
    return target;
  }

  void run_postback(const TemplateDocument& doc) {
    const auto& view_id = doc.source_file;
    phase(1, [&] {
      if (!restore(view_id)) build_fresh(doc);
    });
    phase(2, [&] { apply_request_values(); });
    std::vector<ValidationFailure> failures;
    phase(3, [&] {
      failures = process_validations(view_.roots, app_.validators(), &ctx_);
      if (!failures.empty()) report_failures(failures);
    });
    if (!failures.empty()) {
      phase(6, [&] { render_page(doc); });
      label_ = "POST-validation-failed";
      return;
    }
    phase(4, [&] { update_model_values(); });
    std::optional<std::string> next_view;
    phase(5, [&] { next_view = invoke_application(view_id); });
    const TemplateDocument* next_doc = next_view ? app_.page(*next_view) : nullptr;
    if (next_view && next_doc == nullptr) throw LifecycleError(LifecycleError::Kind::UnknownView, *next_view);
    phase(6, [&] {
      if (next_doc != nullptr) {
        build_fresh(*next_doc);
        render_page(*next_doc);
      } else {
        render_page(doc);
      }
    });
    label_ = next_doc != nullptr ? "POST-navigated" : "POST-success";
  }

  void run_ajax(const TemplateDocument& doc) {
    const auto& view_id = doc.source_file;
    bool restored = false;
    phase(1, [&] {
      restored = restore(view_id);
      if (!restored) build_fresh(doc);
    });
    if (!restored) {
      // The session no longer holds the view: answer with a full page.
      phase(6, [&] { render_page(doc); });
      label_ = "AJAX-view-recreated";
      note_ = "view-recreated";
      return;
    }

    phase(2, [&] { apply_request_values(); });
    std::vector<ValidationFailure> failures;
    phase(3, [&] {
      failures = process_validations(view_.roots, app_.validators(), &ctx_);
      if (!failures.empty()) report_failures(failures);
    });
    if (failures.empty()) {
      phase(4, [&] { update_model_values(); });
      phase(5, [&] { invoke_application(view_id); });
    }
    PartialUpdate update;
    phase(6, [&] { update = handle_ajax(env_, view_, app_.registry(), &ctx_); });
    partial_ = update;
    label_ = update.handled_by == units::kSpecialAjaxHandler ? "AJAX-special" : "AJAX-default";
  }

  std::vector<ProvenanceRecord> collect_records(const std::vector<ComponentNode>& nodes) const {
    std::vector<ProvenanceRecord> out;
    for_each_component(nodes, [&](const ComponentNode& node) {
      const auto* draft = ctx_.collector.find(node.id);
      if (draft == nullptr) return;
      ProvenanceRecord r;
      r.component_id = node.id;
      r.type_path = node.type_path;
      r.tag = node.tag;
      r.source = node.location;
      r.attribute_events = draft->attribute_events;
      r.server_path = draft->server_path;
      r.request_id = ctx_.request_id;
      r.session_id = ctx_.session_id;
      out.push_back(std::move(r));
    });
    return out;
  }

  Response finish() {
    Response resp;
    resp.request_id = env_.request_id;
    resp.session_id = session_id_;
    resp.view_id = view_.view_id;
    resp.phases = phases_;
    resp.path_label = label_;
    resp.trace = ctx_.collector.trace();
    resp.violations = ctx_.violations;
    resp.event_count = ctx_.collector.event_count();

    std::string html;
    if (partial_) {
      const ComponentNode* target = find_component(view_.roots, partial_->target_id);
      if (ctx_.enabled && target != nullptr) resp.records = collect_records(std::vector<ComponentNode>{*target});
      html = partial_->html;
    } else {
      if (ctx_.enabled) resp.records = collect_records(view_.roots);
      html = std::move(html_);
    }

    if (ctx_.enabled) {
      auto encoded = encode_page(html, resp.records, PhaseSummary{env_.request_id, phases_, label_});
      html = std::move(encoded.html);
      if (!encoded.dropped.empty()) {
        resp.headers.emplace_back("X-Prov-Dropped", std::to_string(encoded.dropped.size()));
        std::erase_if(resp.records, [&](const ProvenanceRecord& r) {
          return std::find(encoded.dropped.begin(), encoded.dropped.end(), r.component_id) != encoded.dropped.end();
        });
      }
    }

    if (partial_) {
      resp.content_type = "application/xml; charset=utf-8";
      resp.body = "<partial-response><update id=\"" + partial_->target_id + "\">" + html + "</update></partial-response>";
    } else {
      resp.body = std::move(html);
    }

    resp.headers.emplace_back("X-Request-Id", env_.request_id);
    resp.headers.emplace_back("X-Prov", ctx_.enabled ? "on" : "off");
    if (note_) resp.headers.emplace_back("X-Prov-Note", *note_);
    if (!ctx_.violations.empty()) {
      std::string joined;
      for (const auto& v : ctx_.violations) {
        if (!joined.empty()) joined += "; ";
        joined += v;
      }
      resp.headers.emplace_back("X-Prov-Error", sanitize_header(joined));
    }
    return resp;
  }

  const RequestEnvelope& env_;
  const Application& app_;
  SessionStore& sessions_;
  RequestContext ctx_;
  std::string session_id_;
  ModelBag model_;
  View view_;
  std::string html_;
  std::optional<PartialUpdate> partial_;
  std::vector<int> phases_;
  std::string label_;
  std::optional<std::string> note_;
  std::set<std::string> submitted_;
};

}  // namespace

LifecycleError::LifecycleError(Kind kind, const std::string& detail)
    : std::runtime_error(std::string(kind == Kind::UnknownView           ? "UnknownView: "
                                     : kind == Kind::UnknownRenderTarget ? "UnknownRenderTarget: "
                                     : kind == Kind::MissingRenderParam  ? "MissingRenderParam: "
                                                                         : "BadRequest: ") +
                         detail),
      kind_(kind) {}

const std::string* Response::header(std::string_view name) const {
  for (const auto& [key, value] : headers) {
    if (std::ranges::equal(key, name, [](char a, char b) { return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b)); }))
      return &value;
  }
  return nullptr;
}

std::vector<ValidationFailure> process_validations(std::vector<ComponentNode>& tree, const ValidatorRegistry& validators,
                                                   RequestContext* ctx) {
  std::vector<ValidationFailure> failures;
  for_each_component(tree, [&](ComponentNode& node) {
    if (attr_is(node, "required", "true")) {
      DispatchPoint point{{validators.required_unit, "validate", 1, {"string"}, "boolean"}, {node.value}, &node, node.location};
      bool ok = dispatch(ctx, point, [&] { return !node.value.empty(); });
      if (!ok) {
        node.valid = false;
        failures.push_back({node.id, validators.required_unit, label_of(node) + ": a value is required"});
        return;
      }
    }
    if (attr_is(node, "converter", "int") && !node.value.empty()) {
      DispatchPoint point{{validators.int_converter_unit, "getAsObject", 1, {"string"}, "boolean"}, {node.value}, &node, node.location};
      bool ok = dispatch(ctx, point, [&] { return is_integer(node.value); });
      if (!ok) {
        node.valid = false;
        failures.push_back({node.id, validators.int_converter_unit,
                            label_of(node) + ": '" + node.value + "' is not an integer (" + validators.int_converter_unit + ")"});
      }
    }
  });
  return failures;
}

PartialUpdate handle_ajax(const RequestEnvelope& env, View& view, const ComponentRegistry& registry, RequestContext* ctx) {
  const auto* render = env.param("render");
  if (render == nullptr) throw LifecycleError(LifecycleError::Kind::MissingRenderParam, "render");
  ComponentNode* target = find_component(view.roots, *render);
  if (target == nullptr) throw LifecycleError(LifecycleError::Kind::UnknownRenderTarget, *render);

  auto handler_point = [&](const char* unit, const char* result) {
    return DispatchPoint{{unit, "handle", 1, {"AjaxRequest"}, result}, {OpaqueArg{"AjaxRequest"}}, target, target->location};
  };

  bool special = dispatch(ctx, handler_point(units::kParamInterceptor, "boolean"),
                          [&] { return env.param("param2") != nullptr; });

  PartialUpdate update;
  update.target_id = target->id;
  if (special) {
    update.handled_by = units::kSpecialAjaxHandler;
    update.html = dispatch(ctx, handler_point(units::kSpecialAjaxHandler, "string"), [&] {
      set_attribute(*target, "styleClass", "special", ctx);
      return render_component(*target, registry, ctx);
    });
  } else {
    update.handled_by = units::kDefaultAjaxHandler;
    update.html = dispatch(ctx, handler_point(units::kDefaultAjaxHandler, "string"),
                           [&] { return render_component(*target, registry, ctx); });
  }
  return update;
}

Response process_request(const RequestEnvelope& env, const Application& app, SessionStore& sessions,
                         const Instrumentation& instrumentation) {
  return RequestRun(env, app, sessions, instrumentation).run();
}

}  // namespace pathtrace
