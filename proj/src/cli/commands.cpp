#include "puzzleforge/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "puzzleforge/binding.hpp"
#include "puzzleforge/cli/manifest.hpp"
#include "puzzleforge/errors.hpp"
#include "puzzleforge/henon.hpp"
#include "puzzleforge/henon_boxes.hpp"
#include "puzzleforge/measures.hpp"
#include "puzzleforge/parallel.hpp"
#include "puzzleforge/puzzle.hpp"
#include "puzzleforge/regular_cover.hpp"
#include "puzzleforge/strong_reg.hpp"

namespace puzzleforge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Outputs {
 public:
  explicit Outputs(const fs::path& dir) : dir_(dir) {}

  std::ofstream open(const std::string& name) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw ResourceError("cannot write " + (dir_ / name).string());
    files_.push_back(name);
    return out;
  }
  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

void cmd_puzzle(const RunConfig& cfg, Outputs& out) {
  const ScalarMapParam p(cfg.real("a"));
  const auto level = puzzle_level(p, cfg.count("order"));
  auto csv = out.open("pieces.csv");
  csv << "order,index,lo,hi\n";
  for (const auto& pc : level.pieces)
    csv << pc.order << ',' << pc.index << ',' << num(pc.interval.lo) << ',' << num(pc.interval.hi) << '\n';
  const auto cover = enumerate_regular(p, cfg.count("order_cap"), cfg.real("kappa"), {cfg.workers});
  json j = to_json(cover);
  j["a"] = p.a();
  out.write_json("cover.json", j);
  std::cout << level.pieces.size() << " pieces of order " << level.order << "; uncovered at cap "
            << num(cover.uncovered_measure.back()) << '\n';
}

std::string prefix_string(const ItineraryPrefix& pre) {
  std::string s;
  for (const auto& sym : pre.symbols) {
    if (!s.empty()) s += ';';
    s += std::to_string(sym.order) + ':';
    for (int g : sym.signs) s += g > 0 ? '+' : '-';
  }
  return s;
}

void cmd_classify(const RunConfig& cfg, Outputs& out) {
  const RealInterval w = cfg.window("window");
  const std::size_t n = cfg.count("grid");
  const std::string sampling = cfg.text("sampling");
  std::vector<double> as(n);
  if (sampling == "grid") {
    for (std::size_t i = 0; i < n; ++i)
      as[i] = w.lo + w.length() * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  } else if (sampling == "random") {
    std::seed_seq seq{cfg.seed()};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> u(w.lo, w.hi);
    for (auto& a : as) a = u(rng);
    std::sort(as.begin(), as.end());
  } else {
    throw ConfigError("sampling must be grid or random");
  }
  const std::size_t depth = cfg.count("depth"), cap = cfg.count("order_cap");
  const double theta = cfg.real("theta"), kappa = cfg.real("kappa");
  std::vector<ClassificationResult> res(n);
  parallel_for(n, cfg.workers, [&](std::size_t i) {
    res[i] = classify_parameter(ScalarMapParam(as[i]), depth, theta, cap, kappa);
  });
  auto csv = out.open("verdicts.csv");
  csv << "a,verdict,reason,depth,margin,M\n";
  std::map<std::string, std::size_t> verdicts, reasons;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = res[i];
    csv << num(as[i]) << ',' << to_string(r.verdict) << ',' << to_string(r.reason) << ','
        << r.depth_reached << ',' << num(r.diamond_margin) << ','
        << (r.return_time ? std::to_string(*r.return_time) : "") << '\n';
    ++verdicts[to_string(r.verdict)];
    if (r.verdict == Verdict::Excluded) ++reasons[to_string(r.reason)];
  }
  const std::size_t cand = verdicts[to_string(Verdict::StronglyRegularCandidate)];
  json summary = {{"window", {w.lo, w.hi}},
                  {"grid", n},
                  {"sampling", sampling},
                  {"depth", depth},
                  {"theta", theta},
                  {"order_cap", cap},
                  {"kappa", kappa},
                  {"verdicts", verdicts},
                  {"excluded_by_reason", reasons},
                  {"candidate_fraction", static_cast<double>(cand) / static_cast<double>(n)}};
  const std::size_t pdepth = cfg.count("parapuzzle_depth");
  if (pdepth > 0) {
    ParapuzzleParams pp;
    pp.order_cap = cap;
    pp.kappa = kappa;
    pp.eps_param = cfg.real("eps_param");
    pp.workers = cfg.workers;
    const auto windows = parapuzzle_decompose(w, pdepth, pp);
    auto pc = out.open("parapuzzle.csv");
    pc << "lo,hi,undetermined,start_time,prefix\n";
    std::size_t slivers = 0;
    for (const auto& win : windows) {
      slivers += win.undetermined;
      pc << num(win.param_interval.lo) << ',' << num(win.param_interval.hi) << ','
         << (win.undetermined ? 1 : 0) << ','
         << (win.shared_prefix.start_time ? std::to_string(*win.shared_prefix.start_time) : "")
         << ',' << prefix_string(win.shared_prefix) << '\n';
    }
    summary["parapuzzle"] = {{"depth", pdepth}, {"windows", windows.size()}, {"undetermined", slivers}};
  }
  out.write_json("summary.json", summary);
  std::cout << "candidate fraction " << num(summary["candidate_fraction"].get<double>()) << " over "
            << n << " parameters\n";
}

void cmd_select(const RunConfig& cfg, Outputs& out) {
  BindingKnobs k;
  k.delta = cfg.real("delta");
  k.delta_sep = cfg.real("delta_sep");
  k.alpha_frac = cfg.real("alpha_frac");
  k.alpha_BA = cfg.real("alpha_BA");
  k.ell_min = cfg.real("ell_min");
  k.max_k = cfg.count("max_k");
  k.min_width = cfg.real("min_width");
  k.ell_split = cfg.real("ell_split");
  if (k.delta_sep > k.delta) throw ConfigError("delta_sep must not exceed delta");
  const auto rep = run_selection(cfg.window("window"), cfg.count("N_max"), k, cfg.workers);
  out.write_json("selection.json", to_json(rep));
  auto csv = out.open("survivors.csv");
  csv << "lo,hi,center,N,p2_through,resolved,curve_length,bound_time,returns\n";
  for (const auto& s : rep.survivors)
    csv << num(s.param_interval.lo) << ',' << num(s.param_interval.hi) << ',' << num(s.center) << ','
        << s.N << ',' << s.p2_through << ',' << (s.resolved ? 1 : 0) << ',' << num(s.curve_length)
        << ',' << s.bound_time << ',' << s.returns << '\n';
  std::cout << rep.survivors.size() << " surviving windows, measure " << num(rep.surviving_measure())
            << '\n';
}

void cmd_measure(const RunConfig& cfg, Outputs& out) {
  const ScalarMapParam p(cfg.real("a"));
  const bool density = cfg.flag("density"), lyap = cfg.flag("lyapunov");
  if (!density && !lyap) throw ConfigError("measure needs --density and/or --lyapunov");
  if (density) {
    UlamOptions o;
    o.rng_seed = cfg.seed();
    o.burn_in = cfg.count("burn_in");
    o.workers = cfg.workers;
    std::size_t restarts = 0;
    const auto h = ulam_density(p, cfg.count("bins"), cfg.count("iterates"), cfg.count("seeds"), o,
                                &restarts);
    auto csv = out.open("density.csv");
    csv << "bin_center,mass\n";
    for (std::size_t i = 0; i < h.bin_count; ++i) csv << num(h.bin_center(i)) << ',' << num(h.masses[i]) << '\n';
    json j = {{"a", p.a()},
              {"support", {h.support.lo, h.support.hi}},
              {"bins", h.bin_count},
              {"iterates_per_seed", cfg.count("iterates")},
              {"seeds", cfg.count("seeds")},
              {"rng_seed", o.rng_seed},
              {"restarts", restarts},
              {"mean_log_derivative", mean_log_derivative(h)}};
    if (p.a() == -2.0) {
      j["l1_to_arcsine"] = l1_distance(h, arcsine_reference(h.bin_count));
      std::cout << "L1 distance to the arcsine density " << num(j["l1_to_arcsine"].get<double>()) << '\n';
    }
    out.write_json("measure.json", j);
  }
  if (lyap) {
    const std::size_t n = cfg.count("n"), burn = cfg.count("burn_in");
    std::vector<double> discarded;
    double x0 = 0.0;
    LyapunovEstimate est;
    if (cfg.has("x0")) {
      x0 = cfg.real("x0");
      est = lyapunov_1d(p, x0, n, burn);
    } else {
      // A dedicated stream, disjoint from the histogram seeds.
      std::seed_seq seq{cfg.seed(), std::uint64_t{0xffffffffffffffffULL}};
      std::mt19937_64 rng(seq);
      const RealInterval support = p.a() <= -1.0 ? invariant_core(p) : dynamic_interval(p);
      std::uniform_real_distribution<double> u(support.lo, support.hi);
      // Floating-point orbits can freeze on a fixed point (exactly at a = -2);
      // such starts are not typical and are redrawn, up to a limit.
      for (int draw = 0; draw < 32; ++draw) {
        x0 = u(rng);
        est = lyapunov_1d(p, x0, n, burn);
        if (!est.absorbed_at) break;
        discarded.push_back(x0);
      }
    }
    json j = {{"a", p.a()},
              {"x0", x0},
              {"n", n},
              {"burn_in", burn},
              {"exponent", est.exponent},
              {"absorbed_at", est.absorbed_at ? json(*est.absorbed_at) : json(nullptr)},
              {"discarded_starts", discarded}};
    if (!cfg.has("x0")) j["rng_seed"] = cfg.seed();
    out.write_json("lyapunov.json", j);
    std::cout << "lyapunov exponent " << num(est.exponent) << '\n';
  }
}

Polygon parse_region(const std::string& spec) {
  if (spec == "classical") return henon_classical_quadrilateral();
  if (spec.rfind("disk:", 0) == 0) {
    std::stringstream ss(spec.substr(5));
    std::string part;
    std::vector<double> v;
    while (std::getline(ss, part, ',')) v.push_back(parse_real("region", part));
    if (v.size() != 3 || !(v[2] > 0.0)) throw ConfigError("region disk:cx,cy,r needs r > 0");
    return disk_polygon({v[0], v[1]}, v[2]);
  }
  throw ConfigError("region must be classical or disk:cx,cy,r");
}

void cmd_henon(const RunConfig& cfg, Outputs& out) {
  PlaneParams params{cfg.real("a"), cfg.real("b"), {}};
  if (cfg.has("bump")) {
    std::stringstream ss(cfg.text("bump"));
    std::string part;
    std::vector<double> v;
    while (std::getline(ss, part, ',')) v.push_back(parse_real("bump", part));
    if (v.size() != 4 || !(v[3] > 0.0)) throw ConfigError("bump needs amp,cx,cy,r with r > 0");
    params.perturbation = bump_perturbation(v[0], {v[1], v[2]}, v[3]);
  }
  const bool any = cfg.flag("lyapunov") || cfg.flag("cloud") || cfg.flag("trapping") || cfg.flag("pieces");
  if (!any) throw ConfigError("henon needs at least one of --lyapunov --cloud --trapping --pieces");
  const std::size_t burn = cfg.count("burn_in");
  if (cfg.flag("lyapunov")) {
    const auto L = lyapunov_plane(params, cfg.real("x0"), cfg.real("y0"), cfg.count("n"), burn);
    json j = {{"a", params.a},
              {"b", params.b},
              {"x0", cfg.real("x0")},
              {"y0", cfg.real("y0")},
              {"n", L.n},
              {"burn_in", burn},
              {"lambda1", L.lambda1},
              {"mean_log_det", L.mean_log_det}};
    // -inf (b = 0) has no JSON number; it is written as null.
    j["lambda2"] = std::isfinite(L.lambda2) ? json(L.lambda2) : json(nullptr);
    j["sum"] = std::isfinite(L.lambda2) ? json(L.lambda1 + L.lambda2) : json(nullptr);
    j["log_abs_b"] = params.b != 0.0 ? json(std::log(std::abs(params.b))) : json(nullptr);
    if (L.lambda1 > 0.0 && std::isfinite(L.lambda2) && L.lambda1 + L.lambda2 < 0.0)
      j["kaplan_yorke"] = L.kaplan_yorke();
    out.write_json("lyapunov.json", j);
    std::cout << "lambda1 " << num(L.lambda1) << " lambda2 " << num(L.lambda2) << '\n';
  }
  if (cfg.flag("trapping")) {
    const auto rep = trapping_check(params, parse_region(cfg.text("region")), cfg.count("grid"));
    out.write_json("trapping.json", {{"region", cfg.text("region")},
                                     {"grid", cfg.count("grid")},
                                     {"pass", rep.pass},
                                     {"margin", rep.margin},
                                     {"max_penetration", rep.max_penetration},
                                     {"samples", rep.samples}});
    std::cout << "trapping " << (rep.pass ? "pass" : "fail") << " margin " << num(rep.margin) << '\n';
  }
  if (cfg.flag("cloud")) {
    AttractorOptions o;
    o.burn_in = burn;
    o.start = {cfg.real("x0"), cfg.real("y0")};
    const auto s = attractor_sample(params, cfg.count("points"), o);
    auto csv = out.open("cloud.csv");
    csv << "x,y\n";
    for (const auto& z : s.points) csv << num(z.x) << ',' << num(z.y) << '\n';
    auto sw = out.open("sweep.csv");
    sw << "x,y\n";
    for (const auto& z : s.unstable_sweep) sw << num(z.x) << ',' << num(z.y) << '\n';
    const auto bc = box_counting_dimension(s.points);
    out.write_json("attractor.json", {{"points", s.points.size()},
                                      {"sweep_points", s.unstable_sweep.size()},
                                      {"box_counting_slope", bc.slope},
                                      {"eps", bc.eps},
                                      {"counts", bc.counts}});
    std::cout << "box-counting slope " << num(bc.slope) << '\n';
  }
  if (cfg.flag("pieces")) {
    const HenonLikeMap f(params);
    CertificateOptions co;
    co.lambda = cfg.real("lambda");
    co.samples = cfg.count("samples");
    co.seed = cfg.seed();
    co.workers = cfg.workers;
    const auto set = simple_pieces(f, co, cfg.real("kappa"));
    json j = to_json(set);
    j["a"] = params.a;
    j["b"] = params.b;
    j["theta"] = f.theta();
    j["base_right_to_left_distance"] = image_distance(f, set.base.right, set.base.left);
    out.write_json("pieces.json", j);
    std::size_t ok = 0;
    for (const auto& pc : set.pieces) ok += pc.certificate.passed;
    std::cout << set.pieces.size() << " simple pieces (M=" << set.return_time << "), " << ok
              << " certified\n";
  }
}

// CLI11 reads "--window -2e0:-1.999" as two options; glue such negative values on.
std::vector<std::string> glue_negative_values(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& s = args[i];
    const bool opt = s.size() > 2 && s.rfind("--", 0) == 0 && s.find('=') == std::string::npos;
    if (opt && i + 1 < args.size()) {
      const auto& v = args[i + 1];
      if (v.size() > 1 && v[0] == '-' && (std::isdigit(static_cast<unsigned char>(v[1])) || v[1] == '.')) {
        out.push_back(s + "=" + v);
        ++i;
        continue;
      }
    }
    out.push_back(s);
  }
  return out;
}

std::string option_names(const std::string& knob) {
  std::string names = knob.size() == 1 ? "-" + knob + ",--" + knob : "--" + knob;
  if (knob.find('_') != std::string::npos) {
    std::string dashed = knob;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    names += ",--" + dashed;
  }
  if (knob == "N_max") names += ",--Nmax";
  return names;
}

std::string knob_help(const KnobSpec& k) {
  std::string h = k.help;
  if ((k.kind == KnobKind::Real || k.kind == KnobKind::Count) && (k.lo > -1e299 || k.hi < 1e299))
    h += " [" + num(k.lo) + ", " + num(k.hi) + "]";
  h += k.fallback.empty() ? " (no default)" : " (default " + k.fallback + ")";
  return h;
}

}  // namespace

RunConfig parse_command_line(const std::vector<std::string>& raw) {
  CLI::App app{"puzzleforge: quadratic-family and Henon-like map experiments"};
  app.require_subcommand(0, 1);
  std::string config_file, manifest_file, out_dir, workers;
  app.add_option("--manifest", manifest_file, "re-run the configuration recorded in a manifest");
  for (CLI::App* a : {&app}) {
    a->add_option("--config", config_file, "key=value configuration file");
    a->add_option("--out", out_dir, "output directory");
    a->add_option("--workers", workers, "worker threads (default PUZZLEFORGE_WORKERS or 1)");
  }
  app.fallthrough();
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->fallthrough();
    for (const auto& k : command_knobs(name)) {
      const std::string key = k.name;
      if (k.kind == KnobKind::Flag) {
        sub->add_flag_callback(option_names(key), [&flags, key] { flags[key] = "true"; }, k.help);
      } else {
        sub->add_option_function<std::string>(
            option_names(key), [&flags, key](const std::string& v) { flags[key] = v; }, knob_help(k));
      }
    }
    subs[name] = sub;
  }
  std::vector<std::string> args = glue_negative_values(raw);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints help or the parse error with usage
    throw;
  }

  RunConfig cfg;
  if (!manifest_file.empty()) {
    if (!app.get_subcommands().empty()) throw ConfigError("--manifest does not take a command");
    cfg = config_from_manifest(manifest_file);
    if (!flags.empty()) throw ConfigError("--manifest re-runs the recorded config; knobs are not accepted");
  } else {
    if (app.get_subcommands().empty()) throw ConfigError("no command given (" + app.help() + ")");
    const std::string command = app.get_subcommands().front()->get_name();
    std::map<std::string, std::string> file_values;
    if (!config_file.empty()) file_values = read_config_file(config_file);
    std::map<std::string, std::string> over = flags;
    if (!workers.empty()) over["workers"] = workers;
    else if (!file_values.count("workers")) over["workers"] = std::to_string(default_workers());
    cfg = resolve_config(command, file_values, over);
    if (!config_file.empty()) cfg.inputs.push_back(config_file);
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (!manifest_file.empty() && !workers.empty()) cfg.workers = parse_count("workers", workers);
  return cfg;
}

std::vector<std::string> execute(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw ResourceError("cannot create " + cfg.output_dir.string() + ": " + ec.message());
  Outputs out(cfg.output_dir);
  if (cfg.command == "puzzle") cmd_puzzle(cfg, out);
  else if (cfg.command == "classify") cmd_classify(cfg, out);
  else if (cfg.command == "select") cmd_select(cfg, out);
  else if (cfg.command == "measure") cmd_measure(cfg, out);
  else if (cfg.command == "henon") cmd_henon(cfg, out);
  else throw ConfigError("unknown command " + cfg.command);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(cfg, out.files(), wall);
  return out.files();
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    execute(parse_command_line(args));
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace puzzleforge::cli
