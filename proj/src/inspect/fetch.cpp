#include <fstream>
#include <sstream>

#include <httplib.h>

#include "pathtrace/inspect.hpp"

namespace pathtrace {

std::string load_source(const std::string& source) {
  if (source.starts_with("http://")) {
    auto rest = source.substr(7);
    auto slash = rest.find('/');
    auto authority = rest.substr(0, slash);
    auto path = slash == std::string::npos ? std::string("/") : rest.substr(slash);
    httplib::Client client("http://" + authority);
    client.set_connection_timeout(5);
    client.set_read_timeout(30);
    auto res = client.Get(path);
    if (!res) throw std::runtime_error("fetch failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw std::runtime_error("fetch failed: HTTP " + std::to_string(res->status));
    return res->body;
  }
  std::ifstream in(source, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + source);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pathtrace
