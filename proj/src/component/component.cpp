#include "pathtrace/component.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "../provenance/html_scan.hpp"
#include "pathtrace/expression.hpp"

namespace pathtrace {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string capitalize(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

void set_or_replace(AttributeList& attrs, const std::string& name, const std::string& value) {
  for (auto& [key, v] : attrs) {
    if (key == name) {
      v = value;
      return;
    }
  }
  attrs.emplace_back(name, value);
}

// ---- renderers --------------------------------------------------------------

using ChildRenderer = std::function<std::string(const ComponentNode&)>;
using RenderFn = std::string (*)(const ComponentNode&, const ChildRenderer&);

void put_attr(std::string& out, std::string_view name, std::string_view value) {
  out += ' ';
  out += name;
  out += "=\"";
  out += detail::html_escape(value);
  out += '"';
}

void put_common_tail(std::string& out, const ComponentNode& node) {
  if (const auto* cls = node.attribute("styleClass")) put_attr(out, "class", *cls);
  if (!node.valid) put_attr(out, "aria-invalid", "true");
  put_attr(out, "data-comp", node.type_path);
}

std::string render_input(const ComponentNode& node, std::string_view type) {
  std::string out = "<input";
  put_attr(out, "type", type);
  put_attr(out, "id", node.id);
  put_attr(out, "value", node.value);
  put_common_tail(out, node);
  out += "/>";
  return out;
}

std::string render_input_text(const ComponentNode& node, const ChildRenderer&) { return render_input(node, "text"); }

std::string render_calendar(const ComponentNode& node, const ChildRenderer&) { return render_input(node, "date"); }

std::string render_panel(const ComponentNode& node, const ChildRenderer& child) {
  std::string out = "<div";
  put_attr(out, "id", node.id);
  put_common_tail(out, node);
  out += '>';
  for (const auto& c : node.children) out += child(c);
  out += "</div>";
  return out;
}

std::string render_command_button(const ComponentNode& node, const ChildRenderer&) {
  std::string out = "<button";
  put_attr(out, "type", "submit");
  put_attr(out, "id", node.id);
  put_common_tail(out, node);
  out += '>';
  out += detail::html_escape(node.value.empty() ? node.id : node.value);
  out += "</button>";
  return out;
}

std::string render_messages(const ComponentNode& node, const ChildRenderer&) {
  std::string out = "<ul";
  put_attr(out, "id", node.id);
  put_common_tail(out, node);
  out += '>';
  for (const auto& m : node.messages) {
    out += "<li>";
    out += detail::html_escape(m);
    out += "</li>";
  }
  out += "</ul>";
  return out;
}

RenderFn find_renderer(std::string_view renderer_path) {
  static const std::pair<std::string_view, RenderFn> kRenderers[] = {
      {"demo.render.html.InputTextRenderer", &render_input_text},
      {"demo.render.html.CalendarRenderer", &render_calendar},
      {"demo.render.html.PanelRenderer", &render_panel},
      {"demo.render.html.CommandButtonRenderer", &render_command_button},
      {"demo.render.html.MessagesRenderer", &render_messages},
  };
  for (const auto& [path, fn] : kRenderers) {
    if (path == renderer_path) return fn;
  }
  return nullptr;
}

void build_children(const std::vector<TemplateNode>& nodes, std::vector<ComponentNode>& out,
                    const ComponentRegistry& registry, const std::map<const TagNode*, std::string>& ids,
                    RequestContext* ctx, const ModelBag* model) {
  for (const auto& n : nodes) {
    if (!n.is_tag()) continue;
    const auto& tag = n.tag();
    auto node = create_component(registry, tag, ids.at(&tag), ctx, model);
    build_children(tag.children, node.children, registry, ids, ctx, model);
    out.push_back(std::move(node));
  }
}

}  // namespace

// ---- ModelBag -----------------------------------------------------------------

std::optional<std::string> ModelBag::get(std::string_view bag, std::string_view key) const {
  auto it = values_.find(std::pair<std::string, std::string>(bag, key));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void ModelBag::put(std::string bag, std::string key, std::string value) {
  values_[{std::move(bag), std::move(key)}] = std::move(value);
}

ModelBag ModelBag::parse(std::string_view text) {
  ModelBag bag;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    auto dot = line.find('.');
    if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
      throw std::invalid_argument("model line " + std::to_string(line_no) + ": expected bag.key=value");
    }
    bag.put(std::string(trim(line.substr(0, dot))), std::string(trim(line.substr(dot + 1, eq - dot - 1))),
            std::string(trim(line.substr(eq + 1))));
  }
  return bag;
}

// ---- ComponentRegistry --------------------------------------------------------

void ComponentRegistry::add(ComponentSpec spec) {
  if (spec.type_path.empty() || spec.renderer_path.empty()) {
    throw RegistryError("component '" + spec.tag + "' needs both a type and a renderer");
  }
  if (spec.tag_class.empty()) spec.tag_class = "demo.taglib." + capitalize(spec.tag) + "Tag";
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.tag == spec.tag; });
  if (it != entries_.end()) {
    *it = std::move(spec);
  } else {
    entries_.push_back(std::move(spec));
  }
}

const ComponentSpec* ComponentRegistry::find(std::string_view tag) const {
  for (const auto& e : entries_) {
    if (e.tag == tag) return &e;
  }
  return nullptr;
}

const ComponentSpec* ComponentRegistry::find_by_type(std::string_view type_path) const {
  for (const auto& e : entries_) {
    if (e.type_path == type_path) return &e;
  }
  return nullptr;
}

ComponentRegistry ComponentRegistry::builtin() {
  ComponentRegistry r;
  r.add({"inputText", "demo.component.html.InputText", "demo.render.html.InputTextRenderer", "demo.taglib.InputTextTag",
         {"id", "value", "label", "required", "converter", "styleClass"}, {{"styleClass", "plain"}}, true});
  r.add({"calendar", "demo.component.html.Calendar", "demo.render.html.CalendarRenderer", "demo.taglib.CalendarTag",
         {"id", "value", "label", "required", "converter", "styleClass"}, {{"styleClass", "rich-calendar"}}, true});
  r.add({"panel", "demo.component.html.Panel", "demo.render.html.PanelRenderer", "demo.taglib.PanelTag",
         {"id", "styleClass"}, {}, false});
  r.add({"commandButton", "demo.component.html.CommandButton", "demo.render.html.CommandButtonRenderer",
         "demo.taglib.CommandButtonTag", {"id", "value", "action", "styleClass"}, {}, false});
  r.add({"messages", "demo.component.html.Messages", "demo.render.html.MessagesRenderer", "demo.taglib.MessagesTag",
         {"id", "styleClass"}, {}, false});
  return r;
}

ComponentRegistry ComponentRegistry::parse(std::string_view text) {
  ComponentRegistry registry;
  std::optional<ComponentSpec> current;
  int line_no = 0;
  auto fail = [&](const std::string& what) -> void {
    throw RegistryError("components line " + std::to_string(line_no) + ": " + what);
  };
  auto finish = [&] {
    if (current) registry.add(std::move(*current));
    current.reset();
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail("malformed section header");
      finish();
      current = ComponentSpec{};
      current->tag = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    auto key = trim(line.substr(0, eq));
    auto value = std::string(trim(line.substr(eq + 1)));

    if (!current) {
      if (key != "namespace") fail("only 'namespace' may appear before the first section");
      registry.namespace_ = value;
      continue;
    }
    if (key == "type") {
      current->type_path = value;
    } else if (key == "renderer") {
      current->renderer_path = value;
    } else if (key == "tag_class") {
      current->tag_class = value;
    } else if (key == "editable") {
      current->editable = value == "true";
    } else if (key == "attributes") {
      std::string_view rest = value;
      while (!rest.empty()) {
        auto comma = rest.find(',');
        auto item = trim(rest.substr(0, comma));
        if (!item.empty()) current->allowed_attributes.emplace_back(item);
        rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
      }
    } else if (key.substr(0, 8) == "default.") {
      set_or_replace(current->defaults, std::string(key.substr(8)), value);
    } else {
      fail("unknown key '" + std::string(key) + "'");
    }
    if (current->type_path.find('.') == std::string::npos && key == "type") fail("type must be a dotted unit path");
  }
  finish();
  return registry;
}

// ---- component operations -----------------------------------------------------

ComponentError::ComponentError(Kind kind, const std::string& detail)
    : std::runtime_error(std::string(kind == Kind::UnknownTag        ? "UnknownTag: "
                                     : kind == Kind::MissingRenderer ? "MissingRenderer: "
                                                                     : "DuplicateId: ") +
                         detail),
      kind_(kind) {}

void set_attribute(ComponentNode& node, const std::string& name, const std::string& value, RequestContext* ctx) {
  DispatchPoint point{{node.type_path, setter_for(name), 1, {"string"}, "void"}, {value}, &node, node.location};
  dispatch(ctx, point, [&] {
    set_or_replace(node.attributes, name, value);
    if (name == "id") node.id = value;
  });
}

ComponentNode create_component(const ComponentRegistry& registry, const TagNode& tag, const std::string& id,
                               RequestContext* ctx, const ModelBag* model) {
  const auto* spec = registry.find(tag.tag);
  if (spec == nullptr || tag.ns != registry.ns()) throw ComponentError(ComponentError::Kind::UnknownTag, tag.qualified_name());

  ComponentNode node;
  const auto* template_id = tag.attribute("id");
  node.id = template_id ? *template_id : id;
  node.type_path = spec->type_path;
  node.tag = tag.qualified_name();
  node.location = tag.location;

  DispatchPoint point{{spec->tag_class, "createComponent", 1, {"TagNode"}, spec->type_path},
                      {tag.qualified_name(), tag.location},
                      &node,
                      tag.location};
  dispatch(ctx, point, [&] {
    for (const auto& [name, value] : spec->defaults) set_attribute(node, name, value, ctx);
    if (template_id == nullptr) set_attribute(node, "id", node.id, ctx);
    for (const auto& [name, value] : tag.attributes) set_attribute(node, name, value, ctx);
    if (const auto* value = node.attribute("value")) {
      node.value = model ? resolve_value_expression(*value, *model, ctx, &node) : *value;
    }
  });
  return node;
}

std::string render_component(const ComponentNode& node, const ComponentRegistry& registry, RequestContext* ctx) {
  const auto* spec = registry.find_by_type(node.type_path);
  if (spec == nullptr) throw ComponentError(ComponentError::Kind::MissingRenderer, "no component registered for " + node.type_path);
  auto fn = find_renderer(spec->renderer_path);
  if (fn == nullptr) throw ComponentError(ComponentError::Kind::MissingRenderer, spec->renderer_path);

  DispatchPoint point{{spec->renderer_path, "encode", 1, {node.type_path}, "string"}, {&node}, &node, node.location};
  return dispatch(ctx, point, [&] {
    return fn(node, [&](const ComponentNode& child) { return render_component(child, registry, ctx); });
  });
}

View build_view(const TemplateDocument& doc, const ComponentRegistry& registry, RequestContext* ctx, const ModelBag* model) {
  std::set<std::string> taken;
  std::vector<const TagNode*> order;
  for_each_tag(doc.root, [&](const TagNode& tag) {
    order.push_back(&tag);
    if (const auto* id = tag.attribute("id")) {
      if (!taken.insert(*id).second) throw ComponentError(ComponentError::Kind::DuplicateId, *id + " in " + doc.source_file);
    }
  });

  std::map<const TagNode*, std::string> ids;
  int next = 1;
  for (const auto* tag : order) {
    if (const auto* id = tag->attribute("id")) {
      ids[tag] = *id;
      continue;
    }
    std::string candidate;
    do {
      candidate = "auto_" + std::to_string(next++);
    } while (taken.contains(candidate));
    taken.insert(candidate);
    ids[tag] = candidate;
  }

  View view;
  view.view_id = doc.source_file;
  build_children(doc.root, view.roots, registry, ids, ctx, model);
  return view;
}

std::string render_view(const TemplateDocument& doc, const View& view, const ComponentRegistry& registry,
                        RequestContext* ctx) {
  std::string out;
  std::size_t next_root = 0;
  for (const auto& n : doc.root) {
    if (!n.is_tag()) {
      out += n.text().text;
      continue;
    }
    if (next_root >= view.roots.size()) throw std::logic_error("view does not match template " + doc.source_file);
    out += render_component(view.roots[next_root++], registry, ctx);
  }
  return out;
}

ComponentNode* find_component(std::vector<ComponentNode>& roots, std::string_view id) {
  for (auto& node : roots) {
    if (node.id == id) return &node;
    if (auto* hit = find_component(node.children, id)) return hit;
  }
  return nullptr;
}

const ComponentNode* find_component(const std::vector<ComponentNode>& roots, std::string_view id) {
  return find_component(const_cast<std::vector<ComponentNode>&>(roots), id);
}

}  // namespace pathtrace
