#include "puzzleforge/cli/manifest.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include <openssl/evp.h>

#include "puzzleforge/errors.hpp"

namespace puzzleforge::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw ResourceError("sha256 init failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  char tmp[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(tmp, sizeof tmp, "%02x", md[i]);
    hex += tmp;
  }
  return hex;
}

nlohmann::json manifest_json(const RunConfig& cfg, const std::vector<std::string>& outputs,
                             double wall_seconds) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& p : cfg.inputs) inputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& f : outputs)
    outs.push_back({{"file", f}, {"sha256", sha256_file(cfg.output_dir / f)}});
  return {{"tool", "puzzleforge"},
          {"version", kToolVersion},
          {"precision", "binary64"},
          {"command", cfg.command},
          {"config", cfg.knobs},
          {"workers", cfg.workers},
          {"wall_time_s", wall_seconds},
          {"inputs", inputs},
          {"outputs", outs}};
}

void write_manifest(const RunConfig& cfg, const std::vector<std::string>& outputs,
                    double wall_seconds) {
  std::ofstream out(cfg.output_dir / "manifest.json");
  if (!out) throw ResourceError("cannot write manifest in " + cfg.output_dir.string());
  out << manifest_json(cfg, outputs, wall_seconds).dump(2) << '\n';
}

RunConfig config_from_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read manifest " + path.string());
  nlohmann::json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed manifest: " + std::string(e.what()));
  }
  if (!m.contains("command") || !m.contains("config")) throw ConfigError("manifest lacks config echo");
  std::map<std::string, std::string> values;
  for (const auto& [k, v] : m["config"].items()) {
    if (!v.is_string()) throw ConfigError("manifest config values must be strings");
    values[k] = v.get<std::string>();
  }
  if (m.contains("workers")) values["workers"] = std::to_string(m["workers"].get<std::size_t>());
  RunConfig cfg = resolve_config(m["command"].get<std::string>(), {}, values);
  // Recorded inputs are re-hashed so a changed file is at least reported.
  if (m.contains("inputs"))
    for (const auto& rec : m["inputs"]) {
      const std::filesystem::path p = rec.value("path", "");
      if (std::filesystem::exists(p) && sha256_file(p) != rec.value("sha256", ""))
        std::cerr << "warning: input " << p << " changed since the manifest was written\n";
    }
  cfg.inputs.push_back(path);
  return cfg;
}

}  // namespace puzzleforge::cli
