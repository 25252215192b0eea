#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "puzzleforge/cli/config.hpp"

namespace puzzleforge::cli {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_file(const std::filesystem::path& path);

nlohmann::json manifest_json(const RunConfig& cfg, const std::vector<std::string>& outputs,
                             double wall_seconds);
void write_manifest(const RunConfig& cfg, const std::vector<std::string>& outputs,
                    double wall_seconds);

// Rebuilds the RunConfig from a manifest's config echo.
RunConfig config_from_manifest(const std::filesystem::path& path);

}  // namespace puzzleforge::cli
