#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "puzzleforge/interval.hpp"

namespace puzzleforge::cli {

enum class KnobKind { Real, Count, Flag, Window, Text };

struct KnobSpec {
  std::string name;
  KnobKind kind = KnobKind::Real;
  std::string fallback;  // empty: unset unless given
  double lo = -1e300, hi = 1e300;
  std::string help;
};

const std::vector<std::string>& command_names();
// Knobs understood by `command`, in declaration order. Throws ConfigError.
const std::vector<KnobSpec>& command_knobs(const std::string& command);

struct RunConfig {
  std::string command;
  std::map<std::string, std::string> knobs;  // every knob of the command; "" means unset
  std::filesystem::path output_dir = "out";
  std::size_t workers = 1;
  std::vector<std::filesystem::path> inputs;  // files read to build this config

  bool has(const std::string& key) const;
  double real(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  bool flag(const std::string& key) const;
  RealInterval window(const std::string& key) const;
  std::uint64_t seed() const;  // rng_seed, mandatory where called
  const std::string& text(const std::string& key) const;
};

// Fills defaults, applies `file_values` then `flag_values` (flags win), and
// validates every set knob against its range.
RunConfig resolve_config(const std::string& command,
                         const std::map<std::string, std::string>& file_values,
                         const std::map<std::string, std::string>& flag_values);

// Flat key=value file; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// Accepts plain integers and exact scientific forms such as 1e7.
std::size_t parse_count(const std::string& key, const std::string& text);
double parse_real(const std::string& key, const std::string& text);
RealInterval parse_window(const std::string& key, const std::string& text);

}  // namespace puzzleforge::cli
