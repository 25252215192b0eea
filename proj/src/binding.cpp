#include "puzzleforge/binding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "puzzleforge/parallel.hpp"

namespace puzzleforge {

std::string to_string(ReturnCase c) {
  switch (c) {
    case ReturnCase::A:
      return "a";
    case ReturnCase::B:
      return "b";
    case ReturnCase::C:
      return "c";
  }
  return "?";
}

std::string to_string(ExclusionCause c) {
  switch (c) {
    case ExclusionCause::CaseC:
      return "case_c";
    case ExclusionCause::ViolatesH:
      return "H";
    case ExclusionCause::Overflow:
      return "overflow";
  }
  return "?";
}

nlohmann::json to_json(const BindingKnobs& k) {
  return {{"delta", k.delta},         {"delta_sep", k.delta_sep}, {"alpha_frac", k.alpha_frac},
          {"alpha_BA", k.alpha_BA},   {"ell_min", k.ell_min},     {"max_k", k.max_k},
          {"min_width", k.min_width}, {"ell_split", k.ell_split}};
}

std::size_t BindingLedger::total_bound_time_before(std::size_t N) const {
  std::size_t s = 0;
  for (const auto& r : returns) {
    if (r.N >= N) break;
    s += std::min(r.k, N - r.N);
  }
  return s;
}

std::vector<double> critical_value_orbit(const ScalarMapParam& p, std::size_t len) {
  std::vector<double> c(len + 1);
  c[0] = p.a();
  for (std::size_t i = 1; i <= len; ++i) c[i] = eval_map(p, c[i - 1]);
  return c;
}

namespace {

std::size_t orbit_len(std::size_t N_max, const BindingKnobs& k) { return N_max + k.max_k + 1; }

// Largest k <= max_k with |c_{N+i} - c_{i-1}| <= delta_sep for i = 1..k.
std::size_t bind_length(const std::vector<double>& c, std::size_t N, double delta_sep,
                        std::size_t max_k) {
  std::size_t k = 0;
  for (std::size_t i = 1; i <= max_k; ++i) {
    if (std::abs(c[N + i] - c[i - 1]) <= delta_sep)
      k = i;
    else
      break;
  }
  return k;
}

bool deep(double x, std::size_t N, double alpha_BA) {
  return std::abs(x) < std::exp(-alpha_BA * static_cast<double>(N));
}

}  // namespace

BindingLedger build_ledger_from_orbit(double a, const std::vector<double>& c, std::size_t N_max,
                                      const BindingKnobs& knobs) {
  if (c.size() < orbit_len(N_max, knobs) + 1)
    throw std::invalid_argument("build_ledger: orbit too short");
  BindingLedger L;
  L.a = a;
  L.horizon = N_max;
  std::size_t bound = 0;
  std::size_t t = 0;
  while (t <= N_max) {
    const double x = c[t];
    if (std::abs(x) >= knobs.delta) {
      ++t;
      continue;
    }
    ReturnRecord r;
    r.N = t;
    r.depth = std::abs(x);
    r.k = bind_length(c, t, knobs.delta_sep, knobs.max_k);
    r.overflow = r.k == knobs.max_k;
    r.c = deep(x, t, knobs.alpha_BA) ? ReturnCase::C : ReturnCase::B;
    if (!L.excluded_at) {
      if (r.c == ReturnCase::C)
        L.excluded_at = Exclusion{t, ExclusionCause::CaseC};
      else if (r.overflow)
        L.excluded_at = Exclusion{t, ExclusionCause::Overflow};
      else if (static_cast<double>(bound + r.k) > knobs.alpha_frac * static_cast<double>(t + r.k))
        L.excluded_at = Exclusion{t, ExclusionCause::ViolatesH};
    }
    L.returns.push_back(r);
    bound += r.k;
    t += r.k + 1;
  }
  return L;
}

BindingLedger build_ledger(const ScalarMapParam& p, std::size_t N_max, const BindingKnobs& knobs) {
  return build_ledger_from_orbit(p.a(), critical_value_orbit(p, orbit_len(N_max, knobs)), N_max,
                                 knobs);
}

Result<BindingTime, BindingOverflow> binding_time(const ScalarMapParam& p, std::size_t N,
                                                  double delta_sep, std::size_t max_k, double delta,
                                                  double alpha_BA) {
  const auto c = critical_value_orbit(p, N + max_k + 1);
  if (std::abs(c[N]) >= delta) return BindingTime{0, ReturnCase::A};
  const std::size_t k = bind_length(c, N, delta_sep, max_k);
  if (k == max_k) return BindingOverflow{N, max_k};
  return BindingTime{k, deep(c[N], N, alpha_BA) ? ReturnCase::C : ReturnCase::B};
}

bool check_H(const BindingLedger& ledger, std::size_t N, double alpha_frac) {
  return static_cast<double>(ledger.total_bound_time_before(N)) <=
         alpha_frac * static_cast<double>(N);
}

Result<CeEstimate, CriticalHit> collet_eckmann_estimate(const ScalarMapParam& p, std::size_t n) {
  if (n < 1) throw std::invalid_argument("collet_eckmann_estimate needs n >= 1");
  const auto c = critical_value_orbit(p, n);
  CeEstimate e;
  e.tail_min = std::numeric_limits<double>::infinity();
  const std::size_t tail_from = std::max<std::size_t>(1, (n + 1) / 2);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (c[i] == 0.0) return CriticalHit{i};
    s += std::log(std::abs(2.0 * c[i]));
    const std::size_t m = i + 1;
    if (m >= tail_from) e.tail_min = std::min(e.tail_min, s / static_cast<double>(m));
  }
  e.rate = s / static_cast<double>(n);
  return e;
}

ExpansionEstimate expansion_outside(const ScalarMapParam& p, double delta, std::size_t n,
                                    MetricKind metric) {
  if (!(delta > 0.0)) throw std::invalid_argument("expansion_outside needs delta > 0");
  if (n < 2) throw std::invalid_argument("expansion_outside needs n >= 2");
  const auto fp = fixed_points(p);
  ExpansionEstimate e;
  e.degenerate = delta >= -fp.alpha;
  e.lambda = std::numeric_limits<double>::infinity();
  constexpr double clip = 1e-12;
  auto weight_sqrt = [&](double x) { return std::sqrt(std::max(4.0 - x * x, clip)); };
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -fp.beta + 2.0 * fp.beta * static_cast<double>(i) / static_cast<double>(n - 1);
    if (std::abs(x) < delta) continue;
    double g = 2.0 * std::abs(x);
    if (metric == MetricKind::Adapted) g *= weight_sqrt(x) / weight_sqrt(eval_map(p, x));
    e.lambda = std::min(e.lambda, g);
    ++e.points_used;
  }
  if (e.points_used == 0) {
    e.degenerate = true;
    e.lambda = 0.0;
  }
  return e;
}

// ---- parameter selection ---------------------------------------------------

namespace {

struct Tracker {
  double a;
  std::vector<double> orbit;  // c_0..c_{N_max}
  std::shared_ptr<const BindingLedger> ledger;
};

using TrackerPtr = std::shared_ptr<const Tracker>;

struct Win {
  double lo, hi;
  TrackerPtr tlo, tmid, thi;
  std::size_t p2_through = 0;
  bool coherent = true;
};

struct Discard {
  double width;
  ExclusionCause cause;
};

TrackerPtr make_tracker(double a, std::size_t N_max, const BindingKnobs& k) {
  const ScalarMapParam p(a);
  auto orbit = critical_value_orbit(p, orbit_len(N_max, k));
  auto ledger = std::make_shared<BindingLedger>(build_ledger_from_orbit(a, orbit, N_max, k));
  orbit.resize(N_max + 1);
  return std::make_shared<Tracker>(Tracker{a, std::move(orbit), std::move(ledger)});
}

bool excluded_by(const Tracker& t, std::size_t step) {
  return t.ledger->excluded_at && t.ledger->excluded_at->step <= step;
}

// Schedules agree on returns at times <= t: same times, binding lengths, overflow flags.
bool same_schedule(const BindingLedger& u, const BindingLedger& v, std::size_t t) {
  std::size_t i = 0;
  for (;; ++i) {
    const bool ue = i >= u.returns.size() || u.returns[i].N > t;
    const bool ve = i >= v.returns.size() || v.returns[i].N > t;
    if (ue || ve) return ue && ve;
    const auto &x = u.returns[i], &y = v.returns[i];
    if (x.N != y.N || x.k != y.k || x.overflow != y.overflow) return false;
  }
}

double curve_length(const Win& w, std::size_t t) {
  return std::abs(w.tmid->orbit[t] - w.tlo->orbit[t]) + std::abs(w.thi->orbit[t] - w.tmid->orbit[t]);
}

void advance(const Win& start, std::size_t t, std::size_t N_max, const BindingKnobs& k,
             std::vector<Win>& keep, std::vector<Discard>& dropped) {
  std::vector<Win> stack{start};
  while (!stack.empty()) {
    Win w = std::move(stack.back());
    stack.pop_back();
    if (excluded_by(*w.tmid, t)) {
      dropped.push_back({w.hi - w.lo, w.tmid->ledger->excluded_at->cause});
      continue;
    }
    const double len = curve_length(w, t);
    const bool coherent = same_schedule(*w.tlo->ledger, *w.tmid->ledger, t) &&
                          same_schedule(*w.thi->ledger, *w.tmid->ledger, t);
    const bool want_split = !coherent || len > k.ell_split;
    // Short curves are left whole (boundary effect): their disagreement is
    // absorbed into the midpoint schedule rather than split off.
    const bool can_split = 0.5 * (w.hi - w.lo) >= k.min_width && len >= k.ell_min;
    if (want_split && can_split) {
      const double m = w.tmid->a;
      Win left{w.lo, m, w.tlo, make_tracker(0.5 * (w.lo + m), N_max, k), w.tmid, w.p2_through, true};
      Win right{m, w.hi, w.tmid, make_tracker(0.5 * (m + w.hi), N_max, k), w.thi, w.p2_through, true};
      stack.push_back(std::move(right));
      stack.push_back(std::move(left));
      continue;
    }
    w.coherent = w.coherent && coherent;
    if (w.coherent) w.p2_through = t;
    keep.push_back(std::move(w));
  }
}

}  // namespace

double SelectionReport::surviving_measure() const {
  double s = 0.0;
  for (const auto& w : survivors) s += w.param_interval.length();
  return s;
}

SelectionReport run_selection(const RealInterval& window, std::size_t N_max,
                              const BindingKnobs& knobs_in, std::size_t workers) {
  if (!(window.length() > 0.0)) throw std::invalid_argument("run_selection needs a nonempty window");
  BindingKnobs k = knobs_in;
  const ScalarMapParam p_mid(window.mid());
  if (k.ell_min <= 0.0) k.ell_min = 1e-2 * central_interval(p_mid).length();
  if (k.min_width <= 0.0) k.min_width = window.length() * std::ldexp(1.0, -12);
  if (k.ell_split <= 0.0) k.ell_split = k.delta;

  SelectionReport rep;
  rep.window = window;
  rep.N_max = N_max;
  rep.knobs = k;
  rep.survivor_measure.assign(N_max + 1, 0.0);

  std::vector<Win> live;
  {
    auto tlo = make_tracker(window.lo, N_max, k);
    auto thi = make_tracker(window.hi, N_max, k);
    auto tmid = make_tracker(window.mid(), N_max, k);
    live.push_back({window.lo, window.hi, tlo, tmid, thi, 0, true});
  }
  for (std::size_t t = 0; t <= N_max; ++t) {
    std::vector<std::vector<Win>> kept(live.size());
    std::vector<std::vector<Discard>> gone(live.size());
    parallel_for(live.size(), workers,
                 [&](std::size_t i) { advance(live[i], t, N_max, k, kept[i], gone[i]); });
    std::vector<Win> next;
    for (std::size_t i = 0; i < live.size(); ++i) {
      for (auto& w : kept[i]) next.push_back(std::move(w));
      for (const auto& d : gone[i]) {
        ++rep.excluded_windows;
        switch (d.cause) {
          case ExclusionCause::CaseC:
            rep.excluded_case_c += d.width;
            break;
          case ExclusionCause::ViolatesH:
            rep.excluded_H += d.width;
            break;
          case ExclusionCause::Overflow:
            rep.excluded_overflow += d.width;
            break;
        }
      }
    }
    live.swap(next);
    double m = 0.0;
    for (const auto& w : live) m += w.hi - w.lo;
    rep.survivor_measure[t] = m;
  }
  for (const auto& w : live) {
    SelectionWindow s;
    s.param_interval = RealInterval(w.lo, w.hi);
    s.N = N_max;
    s.curve_length = curve_length(w, N_max);
    s.resolved = w.coherent;
    s.p2_through = w.p2_through;
    s.center = w.tmid->a;
    s.ledger = w.tmid->ledger;
    s.bound_time = s.ledger->total_bound_time_before(N_max);
    s.returns = s.ledger->returns.size();
    rep.survivors.push_back(std::move(s));
  }
  return rep;
}

nlohmann::json to_json(const SelectionReport& r) {
  nlohmann::json j;
  j["window"] = {r.window.lo, r.window.hi};
  j["N_max"] = r.N_max;
  j["knobs"] = to_json(r.knobs);
  j["survivor_measure_by_N"] = r.survivor_measure;
  j["exclusions"] = {{"case_c", r.excluded_case_c},
                     {"H", r.excluded_H},
                     {"overflow", r.excluded_overflow},
                     {"windows", r.excluded_windows}};
  const double total = r.surviving_measure();
  j["surviving_measure"] = total;
  j["survivor_fraction"] = total / r.window.length();
  j["p2_check"] = "binding schedules compared at window endpoints and midpoint only";
  auto arr = nlohmann::json::array();
  for (const auto& w : r.survivors)
    arr.push_back({{"lo", w.param_interval.lo},
                   {"hi", w.param_interval.hi},
                   {"center", w.center},
                   {"resolved", w.resolved},
                   {"p2_through", w.p2_through},
                   {"curve_length", w.curve_length},
                   {"bound_time", w.bound_time},
                   {"returns", w.returns}});
  j["windows"] = std::move(arr);
  return j;
}

}  // namespace puzzleforge
