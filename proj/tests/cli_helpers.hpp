#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "puzzleforge/cli/commands.hpp"

namespace cli_test {

namespace fs = std::filesystem;

inline int run(std::vector<std::string> args) {
  args.insert(args.begin(), "puzzleforge");
  std::vector<char*> argv;
  for (auto& s : args) argv.push_back(s.data());
  return puzzleforge::cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

inline fs::path scratch(const std::string& name) {
  static std::atomic<int> counter{0};
  const fs::path p = fs::temp_directory_path() /
                     ("pf_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + "_" + name);
  fs::remove_all(p);
  return p;
}

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

inline std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(slurp(p));
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Every data file listed in dir/manifest.json is byte-identical in `other`.
inline bool same_outputs(const fs::path& dir, const fs::path& other) {
  const auto m = read_json(dir / "manifest.json");
  if (m["outputs"].empty()) return false;
  for (const auto& o : m["outputs"]) {
    const std::string f = o["file"];
    if (!fs::exists(other / f) || slurp(dir / f) != slurp(other / f)) return false;
  }
  return true;
}

}  // namespace cli_test
