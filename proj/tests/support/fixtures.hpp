#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "pathtrace/aspect_config.hpp"
#include "pathtrace/interception.hpp"
#include "pathtrace/lifecycle.hpp"

namespace fixture {

inline std::filesystem::path demo_dir() { return PATHTRACE_DEMO_DIR; }

inline std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline pathtrace::Application demo_app() {
  auto d = demo_dir();
  return pathtrace::Application::load(d / "pages", d / "components.txt", d / "navigation.txt", d / "model.txt");
}

inline std::shared_ptr<const pathtrace::BindingTable> demo_bindings() {
  return pathtrace::BindingTable::weave(pathtrace::load_aspect_config(read(demo_dir() / "aspects.json")),
                                        pathtrace::AdviceRegistry::builtins(), 1);
}

// A private copy of the demo app that a test may edit; removed on destruction.
struct DemoCopy {
  std::filesystem::path dir;

  DemoCopy() {
    static int n = 0;
    dir = std::filesystem::temp_directory_path() /
          ("pathtrace-demo-" + std::to_string(::getpid()) + "-" + std::to_string(++n));
    std::filesystem::remove_all(dir);
    std::filesystem::copy(demo_dir(), dir, std::filesystem::copy_options::recursive);
  }
  ~DemoCopy() {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }
  DemoCopy(const DemoCopy&) = delete;
  DemoCopy& operator=(const DemoCopy&) = delete;

  void write(const std::string& name, const std::string& text) const {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    out << text;
  }
  std::filesystem::path config() const { return dir / "app.json"; }
};

}  // namespace fixture
