#include <algorithm>
#include <fstream>
#include <sstream>

#include "pathtrace/lifecycle.hpp"

namespace pathtrace {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) return out;
    start = tab + 1;
  }
}

}  // namespace

const std::string* RequestEnvelope::param(std::string_view name) const {
  for (const auto& [key, value] : params) {
    if (key == name) return &value;
  }
  return nullptr;
}

void NavigationRules::add(NavigationRule rule) {
  if (find(rule.from_view, rule.outcome)) {
    throw std::invalid_argument("duplicate navigation rule for (" + rule.from_view + ", " + rule.outcome + ")");
  }
  rules_.push_back(std::move(rule));
}

std::optional<std::string> NavigationRules::find(std::string_view from_view, std::string_view outcome) const {
  for (const auto& r : rules_) {
    if (r.from_view == from_view && r.outcome == outcome) return r.to_view;
  }
  return std::nullopt;
}

NavigationRules NavigationRules::parse(std::string_view text) {
  NavigationRules rules;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw std::invalid_argument("navigation line " + std::to_string(line_no) + ": expected from<TAB>outcome<TAB>to");
    }
    rules.add({std::string(fields[0]), std::string(fields[1]), std::string(fields[2])});
  }
  return rules;
}

Application::Application(ComponentRegistry registry, NavigationRules navigation, ModelBag model_seed,
                         ValidatorRegistry validators)
    : registry_(std::move(registry)),
      navigation_(std::move(navigation)),
      model_seed_(std::move(model_seed)),
      validators_(std::move(validators)) {}

void Application::add_page(const std::string& view_id, std::string_view text) {
  auto doc = parse_template(text, view_id, registry_.namespaces());
  // Fail at load time rather than on the first request.
  build_view(doc, registry_, nullptr, nullptr);
  pages_.insert_or_assign(view_id, std::move(doc));
}

const TemplateDocument* Application::page(std::string_view view_id) const {
  auto it = pages_.find(view_id);
  return it == pages_.end() ? nullptr : &it->second;
}

std::vector<std::string> Application::page_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : pages_) out.push_back(id);
  return out;
}

Application Application::load(const std::filesystem::path& pages_dir, const std::filesystem::path& components_file,
                              const std::filesystem::path& navigation_file, const std::filesystem::path& model_file) {
  Application app(ComponentRegistry::parse(read_file(components_file)), NavigationRules::parse(read_file(navigation_file)),
                  model_file.empty() ? ModelBag{} : ModelBag::parse(read_file(model_file)));
  for (const auto& entry : std::filesystem::recursive_directory_iterator(pages_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".xhtml") continue;
    auto rel = std::filesystem::relative(entry.path(), pages_dir).generic_string();
    app.add_page(rel, read_file(entry.path()));
  }
  return app;
}

std::optional<std::string> view_id_from_path(std::string_view path) {
  if (path.starts_with("/pages/")) {
    path.remove_prefix(7);
  } else if (path.starts_with("/")) {
    path.remove_prefix(1);
  }
  if (path.empty()) return std::nullopt;
  std::string id(path);
  if (!id.ends_with(".xhtml")) id += ".xhtml";
  std::size_t start = 0;
  while (start <= id.size()) {
    auto slash = id.find('/', start);
    auto seg = std::string_view(id).substr(start, slash == std::string::npos ? std::string::npos : slash - start);
    if (seg == ".." || seg.empty()) return std::nullopt;
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return id;
}

}  // namespace pathtrace
