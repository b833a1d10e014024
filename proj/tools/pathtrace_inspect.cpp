#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pathtrace/inspect.hpp"

using namespace pathtrace;

namespace {

void print_report(const InspectionReport& r) {
  std::cout << r.component_id << "  " << r.tag << "\n";
  std::cout << "  Attributes\n";
  for (const auto& a : r.attributes) {
    std::cout << "    " << a.name << " = \"" << a.value << "\"  set by " << a.set_by << "  line " << a.line << "\n";
  }
  std::cout << "  Server Path\n";
  for (const auto& s : r.server_path) std::cout << "    [" << s.phase << "] " << s.unit << "." << s.method << "\n";
  if (r.summary) {
    std::cout << "  Phases";
    for (int p : r.summary->phases_executed) std::cout << " " << p;
    std::cout << "  (" << r.summary->path_label << ", request " << r.summary->request_id << ")\n";
  }
  std::cout << "  Locations\n";
  for (const auto& loc : r.locations) std::cout << "    " << loc << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Inspect provenance embedded in a rendered page"};
  std::string source, id, tag, format = "text";
  bool list = false, show = false;
  cli.add_option("source", source, "HTML file or http:// URL")->required();
  auto* id_opt = cli.add_option("--id", id, "element id");
  auto* tag_opt = cli.add_option("--tag", tag, "tag filter, e.g. ui:inputText");
  id_opt->excludes(tag_opt);
  cli.add_flag("--list", list, "list instrumented components");
  cli.add_flag("--show", show, "print the Attributes and Server Path views");
  cli.add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = cli.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (!list && id.empty() && tag.empty()) {
    std::cerr << "pathtrace-inspect: one of --id, --tag or --list is required\n";
    return 1;
  }
  auto fmt = format == "json" ? OutputFormat::Json : OutputFormat::Text;

  DecodedPage page;
  try {
    page = decode_page(load_source(source));
  } catch (const std::exception& e) {
    std::cerr << "pathtrace-inspect: " << e.what() << "\n";
    return 1;
  }
  for (const auto& err : page.errors) {
    std::cerr << "decode error" << (err.data_for.empty() ? std::string() : " for '" + err.data_for + "'") << ": "
              << err.message << "\n";
  }
  int ok = page.errors.empty() ? 0 : 3;

  try {
    if (list) {
      auto rows = list_components(page);
      if (fmt == OutputFormat::Json) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& r : rows) arr.push_back({{"id", r.id}, {"tag", r.tag}, {"location", r.location}});
        std::cout << arr.dump() << "\n";
      } else {
        for (const auto& r : rows) std::cout << r.id << "\t" << r.tag << "\t" << r.location << "\n";
      }
      return ok;
    }
    auto reports = inspect(page, id.empty() ? Selector{Selector::Kind::Tag, tag} : Selector{Selector::Kind::Id, id});
    for (const auto& r : reports) {
      if (r.decode_error) {
        std::cerr << "warning: '" << r.component_id << "' has no usable record: " << *r.decode_error << "\n";
        ok = 3;
        continue;
      }
      if (r.locations.empty()) std::cerr << "warning: '" << r.component_id << "' has no source locations\n";
      if (show && fmt == OutputFormat::Text) {
        print_report(r);
      } else {
        std::cout << emit_locations(r, fmt);
      }
    }
  } catch (const InspectError& e) {
    std::cerr << "pathtrace-inspect: " << e.what() << "\n";
    return 2;
  }
  return ok;
}
