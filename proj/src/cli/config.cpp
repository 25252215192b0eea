#include "puzzleforge/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "puzzleforge/errors.hpp"

namespace puzzleforge::cli {

namespace {

using K = KnobKind;
constexpr double kBig = 1e300;

KnobSpec real(std::string n, std::string d, double lo, double hi, std::string help) {
  return {std::move(n), K::Real, std::move(d), lo, hi, std::move(help)};
}
KnobSpec count(std::string n, std::string d, double lo, double hi, std::string help) {
  return {std::move(n), K::Count, std::move(d), lo, hi, std::move(help)};
}
KnobSpec flag(std::string n, std::string help) {
  return {std::move(n), K::Flag, "false", 0, 1, std::move(help)};
}
KnobSpec window(std::string n, std::string help) {
  return {std::move(n), K::Window, "", -2.0, 0.25, std::move(help)};
}
KnobSpec text(std::string n, std::string d, std::string help) {
  return {std::move(n), K::Text, std::move(d), 0, 0, std::move(help)};
}

KnobSpec seed() { return count("rng_seed", "", 0, 1.8e19, "seed of every random stream"); }
KnobSpec kappa() { return real("kappa", "0.05", 1e-6, 1.0, "enlargement of A for regularity"); }

const std::map<std::string, std::vector<KnobSpec>>& table() {
  static const std::map<std::string, std::vector<KnobSpec>> t = {
      {"puzzle",
       {real("a", "", -2.0, 0.25, "parameter of x^2 + a"),
        count("order", "1", 0, 24, "puzzle level to list"),
        count("order_cap", "12", 1, 60, "cover enumeration depth"), kappa()}},
      {"classify",
       {window("window", "parameter window lo:hi"),
        count("grid", "1000", 1, 1e7, "number of parameters"),
        text("sampling", "grid", "grid (cell midpoints) or random (needs rng_seed)"), seed(),
        count("depth", "20", 0, 1000, "itinerary entries to build"),
        real("theta", "0.1", 1e-9, 1.0, "nonsimple share bound"),
        count("order_cap", "60", 1, 200, "largest regular order searched"), kappa(),
        count("parapuzzle_depth", "0", 0, 50, "prefix depth of the parapuzzle table (0: skip)"),
        real("eps_param", "1e-14", 1e-16, 1.0, "parapuzzle bisection floor")}},
      {"select",
       {window("window", "parameter window lo:hi"),
        count("N_max", "200", 1, 1e5, "selection horizon"),
        real("delta", "0.1", 1e-9, 2.0, "critical window half width"),
        real("delta_sep", "0.05", 1e-12, 2.0, "binding separation"),
        real("alpha_frac", "0.1", 0.0, 1.0, "bound-time fraction in (H)"),
        real("alpha_BA", "0.05", 0.0, 10.0, "basic-assumption rate"),
        real("ell_min", "0", 0.0, kBig, "curve length floor (0: automatic)"),
        count("max_k", "100", 1, 1e4, "longest binding period"),
        real("min_width", "0", 0.0, kBig, "window splitting floor (0: automatic)"),
        real("ell_split", "0", 0.0, kBig, "curve length that forces a split (0: delta)")}},
      {"measure",
       {real("a", "", -2.0, 0.25, "parameter of x^2 + a"), flag("density", "Ulam histogram"),
        flag("lyapunov", "Lyapunov exponent of a typical orbit"),
        count("bins", "1000", 100, 1e7, "histogram bins"),
        count("iterates", "1e6", 1, 1e13, "samples per seed"),
        count("seeds", "100", 1, 1e7, "independent orbits"), seed(),
        count("burn_in", "1000", 0, 1e9, "discarded iterates"),
        count("n", "1e7", 1000, 1e12, "Lyapunov iterates"),
        real("x0", "", -2.0, 2.0, "Lyapunov start, drawn from rng_seed when unset")}},
      {"henon",
       {real("a", "-1.4", -10.0, 10.0, "parameter a"), real("b", "-0.3", -0.999999, 0.999999, "Jacobian b"),
        flag("lyapunov", "Lyapunov exponents"), count("n", "1e7", 1, 1e12, "orbit length"),
        real("x0", "0.1", -kBig, kBig, "orbit start x"), real("y0", "0", -kBig, kBig, "orbit start y"),
        count("burn_in", "1000", 0, 1e9, "discarded iterates"),
        flag("cloud", "attractor sample and box counting"),
        count("points", "1e6", 1, 1e8, "cloud size"),
        flag("trapping", "trapping region check"),
        count("grid", "512", 2, 8192, "trapping grid"),
        text("region", "classical", "classical or disk:cx,cy,r"),
        flag("pieces", "base box and simple pieces"),
        real("lambda", "1.5", 1.0, kBig, "certificate rate"),
        count("samples", "1000", 1, 1e7, "certificate samples per piece"), seed(), kappa(),
        text("bump", "", "perturbation amp,cx,cy,r (box coordinates)")}},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"puzzle", "classify", "select", "measure", "henon"};
  return names;
}

const std::vector<KnobSpec>& command_knobs(const std::string& command) {
  const auto it = table().find(command);
  if (it == table().end()) throw ConfigError("unknown command '" + command + "'");
  return it->second;
}

double parse_real(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(key + ": '" + s + "' is not a real number");
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& s) {
  const double v = parse_real(key, s);
  if (v < 0.0 || v != std::floor(v) || v > 1.8e19)
    throw ConfigError(key + ": '" + s + "' is not a non-negative integer");
  // Digit strings parse exactly; the double path only serves forms like 1e7.
  std::uint64_t u = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), u);
  if (ec == std::errc() && ptr == s.data() + s.size()) return static_cast<std::size_t>(u);
  return static_cast<std::size_t>(v);
}

RealInterval parse_window(const std::string& key, const std::string& s) {
  const auto colon = s.find(':', 1);
  if (colon == std::string::npos) throw ConfigError(key + ": expected lo:hi, got '" + s + "'");
  const double lo = parse_real(key, s.substr(0, colon));
  const double hi = parse_real(key, s.substr(colon + 1));
  if (!(lo < hi)) throw ConfigError(key + ": empty window '" + s + "'");
  return RealInterval(lo, hi);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

void validate(const KnobSpec& k, const std::string& v) {
  if (v.empty()) return;
  auto range = [&](double x) {
    if (x < k.lo || x > k.hi)
      throw ConfigError(k.name + "=" + v + " outside [" + std::to_string(k.lo) + ", " +
                        std::to_string(k.hi) + "]");
  };
  switch (k.kind) {
    case K::Real: range(parse_real(k.name, v)); break;
    case K::Count: range(static_cast<double>(parse_count(k.name, v))); break;
    case K::Flag:
      if (v != "true" && v != "false") throw ConfigError(k.name + ": expected true or false");
      break;
    case K::Window: {
      const auto w = parse_window(k.name, v);
      range(w.lo);
      range(w.hi);
      break;
    }
    case K::Text: break;
  }
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig resolve_config(const std::string& command,
                         const std::map<std::string, std::string>& file_values,
                         const std::map<std::string, std::string>& flag_values) {
  const auto& knobs = command_knobs(command);
  RunConfig cfg;
  cfg.command = command;
  for (const auto& k : knobs) cfg.knobs[k.name] = k.fallback;
  for (const auto* src : {&file_values, &flag_values}) {
    for (const auto& [key, value] : *src) {
      if (key == "workers") {
        cfg.workers = parse_count(key, value);
        if (cfg.workers < 1 || cfg.workers > 1024) throw ConfigError("workers outside [1, 1024]");
        continue;
      }
      if (key == "out") {
        cfg.output_dir = value;
        continue;
      }
      if (!cfg.knobs.count(key)) throw ConfigError("'" + key + "' is not a knob of " + command);
      cfg.knobs[key] = value;
    }
  }
  for (const auto& k : knobs) validate(k, cfg.knobs[k.name]);
  return cfg;
}

bool RunConfig::has(const std::string& key) const {
  const auto it = knobs.find(key);
  return it != knobs.end() && !it->second.empty();
}

const std::string& RunConfig::text(const std::string& key) const {
  const auto it = knobs.find(key);
  if (it == knobs.end()) throw ConfigError("'" + key + "' is not a knob of " + command);
  return it->second;
}

namespace {
const std::string& required(const RunConfig& c, const std::string& key) {
  const auto& v = c.text(key);
  if (v.empty()) throw ConfigError(c.command + " requires --" + key);
  return v;
}
}  // namespace

double RunConfig::real(const std::string& key) const { return parse_real(key, required(*this, key)); }
std::size_t RunConfig::count(const std::string& key) const {
  return parse_count(key, required(*this, key));
}
bool RunConfig::flag(const std::string& key) const { return text(key) == "true"; }
RealInterval RunConfig::window(const std::string& key) const {
  return parse_window(key, required(*this, key));
}
std::uint64_t RunConfig::seed() const {
  return static_cast<std::uint64_t>(parse_count("rng_seed", required(*this, "rng_seed")));
}

}  // namespace puzzleforge::cli
