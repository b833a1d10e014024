#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pathtrace/inspect.hpp"
#include "pathtrace/pointcut.hpp"
#include "pathtrace/provenance.hpp"
#include "pathtrace/server.hpp"
#include "pathtrace/template.hpp"

namespace py = pybind11;
using namespace pathtrace;

namespace {

py::dict tag_dict(const TagNode& tag) {
  py::dict d;
  d["ns"] = tag.ns;
  d["tag"] = tag.tag;
  d["attributes"] = tag.attributes;
  d["line"] = tag.location.line;
  d["column"] = tag.location.column;
  py::list children;
  for (const auto& child : tag.children) {
    if (child.is_tag()) children.append(tag_dict(child.tag()));
  }
  d["children"] = children;
  return d;
}

}  // namespace

PYBIND11_MODULE(_pathtrace, m) {
  m.doc() = "pathtrace core bindings";

  py::register_exception<TemplateError>(m, "TemplateError", PyExc_ValueError);
  py::register_exception<PointcutError>(m, "PointcutError", PyExc_ValueError);
  py::register_exception<MalformedPayload>(m, "MalformedPayload", PyExc_ValueError);
  py::register_exception<InspectError>(m, "InspectError", PyExc_LookupError);

  m.def(
      "parse_template",
      [](const std::string& text, const std::string& file_name) {
        auto doc = parse_template(text, file_name);
        py::list tags;
        for (const auto& node : doc.root) {
          if (node.is_tag()) tags.append(tag_dict(node.tag()));
        }
        return py::make_tuple(tags, serialize(doc));
      },
      py::arg("text"), py::arg("file_name"),
      "Returns (top-level tags as dicts, re-serialized text).");

  py::class_<JoinPointId>(m, "JoinPoint")
      .def(py::init([](std::string type_path, std::string method, std::size_t arity, std::vector<std::string> arg_types,
                       std::string return_type) {
             return JoinPointId{std::move(type_path), std::move(method), arity, std::move(arg_types), std::move(return_type)};
           }),
           py::arg("type_path"), py::arg("method"), py::arg("arity"), py::arg("arg_types") = std::vector<std::string>{},
           py::arg("return_type") = "")
      .def_readwrite("type_path", &JoinPointId::type_path)
      .def_readwrite("method", &JoinPointId::method)
      .def_readwrite("arity", &JoinPointId::arity);

  m.def("normalize_pointcut", [](const std::string& text) { return to_string(parse_pointcut(text)); });
  m.def("pointcut_matches", [](const std::string& text, const JoinPointId& jp) { return matches(parse_pointcut(text), jp); });

  m.def("strip", [](const std::string& html) { return strip(html); });
  m.def("base64url_encode", [](const py::bytes& b) { return base64url_encode(std::string(b)); });
  m.def("base64url_decode", [](const std::string& s) { return py::bytes(base64url_decode(s)); });
  m.def("decode_page", [](const std::string& html) {
    auto page = decode_page(html);
    py::list records;
    for (const auto& r : page.records) records.append(to_canonical_json(r));
    py::object summary = page.summary ? py::object(py::str(to_canonical_json(*page.summary))) : py::none();
    py::list errors;
    for (const auto& e : page.errors) errors.append(py::make_tuple(e.data_for, e.message));
    return py::make_tuple(records, summary, errors);
  }, "Returns (record JSON strings, summary JSON or None, [(data_for, message)]).");
  m.def("inspect", [](const std::string& html, const std::string& selector) {
    std::vector<std::string> out;
    for (const auto& r : inspect(std::string_view(html), parse_selector(selector))) out.push_back(to_canonical_json(r));
    return out;
  }, py::arg("html"), py::arg("selector"), "Canonical JSON report per selected element.");
  m.def("list_components", [](const std::string& html) {
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& r : list_components(std::string_view(html))) out.emplace_back(r.id, r.tag, r.location);
    return out;
  });

  py::class_<Response>(m, "Response")
      .def_readonly("status", &Response::status)
      .def_readonly("body", &Response::body)
      .def_readonly("headers", &Response::headers)
      .def_readonly("session_id", &Response::session_id)
      .def_readonly("view_id", &Response::view_id)
      .def_readonly("phases", &Response::phases)
      .def_readonly("path_label", &Response::path_label)
      .def("header", [](const Response& r, const std::string& name) -> py::object {
        const auto* v = r.header(name);
        return v ? py::object(py::str(*v)) : py::none();
      });

  py::class_<Server>(m, "App")
      .def(py::init([](const std::filesystem::path& config, bool no_prov) {
             return std::make_unique<Server>(AppConfig::load(config), ServerOptions{Profile::Dev, no_prov});
           }),
           py::arg("config"), py::arg("no_prov") = false)
      .def(
          "request",
          [](Server& s, const std::string& method, const std::string& path, const ParamList& params, bool ajax,
             std::optional<std::string> session, const ParamList& query) {
            PageRequest req;
            req.method = method == "POST" ? HttpMethod::Post : HttpMethod::Get;
            req.path = path;
            req.form = params;
            req.query = query;
            req.ajax = ajax;
            req.session_id = std::move(session);
            py::gil_scoped_release release;
            return s.handle_page(req);
          },
          py::arg("method"), py::arg("path"), py::arg("params") = ParamList{}, py::arg("ajax") = false,
          py::arg("session") = py::none(), py::arg("query") = ParamList{})
      .def("reload", [](Server& s) {
        auto r = s.reload();
        return py::make_tuple(r.old_bindings, r.new_bindings);
      })
      .def("start", &Server::start, py::arg("host") = "127.0.0.1", py::arg("port") = 0,
           py::call_guard<py::gil_scoped_release>())
      .def("stop", &Server::stop, py::call_guard<py::gil_scoped_release>());
}
