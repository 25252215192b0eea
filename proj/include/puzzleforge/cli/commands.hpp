#pragma once

#include <string>
#include <vector>

#include "puzzleforge/cli/config.hpp"

namespace puzzleforge::cli {

// Exit codes of the front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitResource = 4;

// argv without the program name. Handles --config, --manifest, --out, --workers.
RunConfig parse_command_line(const std::vector<std::string>& args);

// Runs the command, writes its files and manifest.json into cfg.output_dir,
// and returns the names of the data files written (manifest excluded).
std::vector<std::string> execute(const RunConfig& cfg);

// Full front end: parse, execute, map exceptions to exit codes.
int run_cli(int argc, char** argv);

}  // namespace puzzleforge::cli
