#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pathtrace/interception.hpp"
#include "pathtrace/template.hpp"

namespace pathtrace {

/// A UI component instance in a view tree.
struct ComponentNode {
  std::string id;
  std::string type_path;
  /// Qualified tag name this node was built from, e.g. `ui:inputText`.
  std::string tag;
  AttributeList attributes;
  std::string value;
  bool valid = true;
  /// Faces-style messages; only the messages component renders them.
  std::vector<std::string> messages;
  std::vector<ComponentNode> children;
  SourceLocation location;

  const std::string* attribute(std::string_view name) const { return find_attribute(attributes, name); }
  bool operator==(const ComponentNode&) const = default;
};

/// Backing store for `#{bag.key}` value expressions.
class ModelBag {
 public:
  std::optional<std::string> get(std::string_view bag, std::string_view key) const;
  void put(std::string bag, std::string key, std::string value);
  std::size_t size() const { return values_.size(); }

  /// Lines of `bag.key=value`; blank lines and `#` comments are ignored.
  static ModelBag parse(std::string_view text);

  bool operator==(const ModelBag&) const = default;

 private:
  std::map<std::pair<std::string, std::string>, std::string, std::less<>> values_;
};

struct ComponentSpec {
  std::string tag;
  std::string type_path;
  std::string renderer_path;
  /// Unit that builds the component from its tag (the taglib class).
  std::string tag_class;
  std::vector<std::string> allowed_attributes;
  AttributeList defaults;
  /// Receives request values in Apply Request Values.
  bool editable = false;
};

class RegistryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ComponentRegistry {
 public:
  void add(ComponentSpec spec);
  const ComponentSpec* find(std::string_view tag) const;
  const ComponentSpec* find_by_type(std::string_view type_path) const;

  const std::string& ns() const { return namespace_; }
  void set_namespace(std::string ns) { namespace_ = std::move(ns); }
  NamespaceSet namespaces() const { return {namespace_}; }
  const std::vector<ComponentSpec>& entries() const { return entries_; }

  /// inputText, calendar, panel, commandButton and messages.
  static ComponentRegistry builtin();

  /// Reads the components file format:
  ///
  ///   namespace = ui
  ///   [inputText]
  ///   type = demo.component.html.InputText
  ///   renderer = demo.render.html.InputTextRenderer
  ///   tag_class = demo.taglib.InputTextTag      (optional)
  ///   editable = true                           (optional)
  ///   attributes = id, value, required
  ///   default.styleClass = plain
  static ComponentRegistry parse(std::string_view text);

 private:
  std::string namespace_ = "ui";
  std::vector<ComponentSpec> entries_;
};

class ComponentError : public std::runtime_error {
 public:
  enum class Kind { UnknownTag, MissingRenderer, DuplicateId };

  ComponentError(Kind kind, const std::string& detail);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Writes one attribute through the interceptable setter
/// `{type_path, set<Name>, 1}`. Writing `id` also renames the node.
void set_attribute(ComponentNode& node, const std::string& name, const std::string& value, RequestContext* ctx);

/// Builds a component from its tag: defaults first, then template attributes,
/// every write going through set_attribute. The whole construction is the join
/// point `{tag_class, createComponent, 1}`. `id` is used when the tag has none.
/// A `value` attribute is resolved against `model` into ComponentNode::value.
ComponentNode create_component(const ComponentRegistry& registry, const TagNode& tag, const std::string& id,
                               RequestContext* ctx, const ModelBag* model = nullptr);

/// Encodes a node (and its children) to HTML via the renderer registered for
/// its type, dispatched as `{renderer_path, encode, 1}`.
std::string render_component(const ComponentNode& node, const ComponentRegistry& registry, RequestContext* ctx = nullptr);

/// A view: the ordered component roots built from one template document.
struct View {
  std::string view_id;
  std::vector<ComponentNode> roots;

  bool operator==(const View&) const = default;
};

/// Builds every tag of the document into components. Ids missing in the
/// template become `auto_<n>` (1-based, document order, skipping taken ids).
/// Throws ComponentError(DuplicateId) if two components share an id.
View build_view(const TemplateDocument& doc, const ComponentRegistry& registry, RequestContext* ctx,
                const ModelBag* model);

/// Renders a full page: raw template text verbatim, each root tag replaced by
/// its component's HTML.
std::string render_view(const TemplateDocument& doc, const View& view, const ComponentRegistry& registry,
                        RequestContext* ctx);

ComponentNode* find_component(std::vector<ComponentNode>& roots, std::string_view id);
const ComponentNode* find_component(const std::vector<ComponentNode>& roots, std::string_view id);

/// Depth-first pre-order visit.
template <class Nodes, class F>
void for_each_component(Nodes& roots, F&& fn) {
  for (auto& node : roots) {
    fn(node);
    for_each_component(node.children, fn);
  }
}

}  // namespace pathtrace
