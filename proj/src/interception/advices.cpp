#include "pathtrace/component.hpp"
#include "pathtrace/interception.hpp"

namespace pathtrace {

namespace {

const std::string* string_arg(const Invocation& inv, std::size_t i) {
  auto args = inv.arguments();
  if (i >= args.size()) return nullptr;
  return std::get_if<std::string>(&args[i]);
}

int line_of(const Invocation& inv) {
  if (inv.location()) return inv.location()->line;
  if (inv.target()) return inv.target()->location.line;
  return 0;
}

void add_path_entry(Invocation& inv) {
  auto& ctx = inv.context();
  const auto* target = inv.target();
  if (target == nullptr) return;
  const auto& jp = inv.join_point();
  ctx.collector.record_for(target->id).server_path.push_back({jp.type_path, jp.method, ctx.current_phase});
}

// Setter interception: who wrote which attribute value, from which template line.
std::any component_setter(Invocation& inv) {
  if (const auto* target = inv.target()) {
    auto& record = inv.context().collector.record_for(target->id);
    const auto* value = string_arg(inv, 0);
    record.attribute_events.push_back(
        {attribute_from_setter(inv.join_point().method), value ? *value : std::string(), aspects::kComponent, line_of(inv)});
    add_path_entry(inv);
  }
  return inv.invoke_next();
}

// A component restored from session state re-reports its current attributes.
std::any component_restore(Invocation& inv) {
  if (const auto* target = inv.target()) {
    auto& record = inv.context().collector.record_for(target->id);
    for (const auto& [name, value] : target->attributes) {
      record.attribute_events.push_back({name, value, aspects::kComponent, target->location.line});
    }
    add_path_entry(inv);
  }
  return inv.invoke_next();
}

std::any component_trace(Invocation& inv) {
  add_path_entry(inv);
  return inv.invoke_next();
}

std::any tag_construct(Invocation& inv) {
  if (const auto* target = inv.target()) {
    auto& record = inv.context().collector.record_for(target->id);
    if (const auto* tag = string_arg(inv, 0)) record.tag = *tag;
    if (inv.location()) record.source = *inv.location();
    record.type_path = target->type_path;
    add_path_entry(inv);
  }
  return inv.invoke_next();
}

std::any render_encode(Invocation& inv) {
  add_path_entry(inv);
  return inv.invoke_next();
}

std::any phase_step(Invocation& inv) {
  auto& ctx = inv.context();
  const auto& jp = inv.join_point();
  PhaseStep step{ctx.current_phase, jp.type_path, jp.method, inv.location(), std::nullopt};
  std::string note;
  for (const auto& arg : inv.arguments()) {
    if (const auto* s = std::get_if<std::string>(&arg)) {
      if (!note.empty()) note += '.';
      note += *s;
    }
  }
  if (!note.empty()) step.note = std::move(note);
  ctx.collector.trace().steps.push_back(std::move(step));
  return inv.invoke_next();
}

std::any ajax_handle(Invocation& inv) {
  add_path_entry(inv);
  return inv.invoke_next();
}

}  // namespace

AdviceRegistry AdviceRegistry::builtins() {
  AdviceRegistry r;
  r.add({"setter", aspects::kComponent, &component_setter});
  r.add({"restore", aspects::kComponent, &component_restore});
  r.add({"trace", aspects::kComponent, &component_trace});
  r.add({"construct", aspects::kTag, &tag_construct});
  r.add({"encode", aspects::kRender, &render_encode});
  r.add({"phase", aspects::kPhase, &phase_step});
  r.add({"handle", aspects::kAjax, &ajax_handle});
  return r;
}

}  // namespace pathtrace
