#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "puzzleforge/errors.hpp"
#include "puzzleforge/interval.hpp"
#include "puzzleforge/scalar_dynamics.hpp"

namespace puzzleforge {

enum class ReturnCase { A, B, C };

std::string to_string(ReturnCase c);

enum class MetricKind { Adapted, Flat };

struct BindingKnobs {
  double delta = 0.1;       // critical window [-delta, delta]
  double delta_sep = 0.05;  // binding closeness, default delta/2
  double alpha_frac = 0.1;  // (H_N): bound time <= alpha_frac * N
  double alpha_BA = 0.05;   // case (c): |c_N| < exp(-alpha_BA * N)
  double ell_min = 0.0;     // (P3) floor; <= 0 means 1e-2 * |A|
  std::size_t max_k = 100;  // longest binding period before overflow
  // Parameter resolution of run_selection: windows narrower than this are not
  // split. <= 0 means window length * 2^-12.
  double min_width = 0.0;
  // Curves longer than this are split even when the schedules agree. <= 0: delta.
  double ell_split = 0.0;
};

nlohmann::json to_json(const BindingKnobs& k);

struct ReturnRecord {
  std::size_t N = 0;
  double depth = 0.0;  // |c_N|
  std::size_t k = 0;   // binding time
  ReturnCase c = ReturnCase::B;
  bool overflow = false;  // separation not reached within max_k
  friend bool operator==(const ReturnRecord&, const ReturnRecord&) = default;
};

enum class ExclusionCause { CaseC, ViolatesH, Overflow };

std::string to_string(ExclusionCause c);

struct Exclusion {
  std::size_t step = 0;
  ExclusionCause cause = ExclusionCause::CaseC;
  friend bool operator==(const Exclusion&, const Exclusion&) = default;
};

// Returns of the critical value orbit c_n = P^n(a), c_0 = a, into
// (-delta, delta) up to N_max, with the binding time of each. Free times
// jump from a return at N straight to N + k + 1. The schedule itself does not
// depend on alpha_frac or alpha_BA; those only decide `excluded_at`.
struct BindingLedger {
  double a = 0.0;
  std::size_t horizon = 0;  // N_max the ledger was built to
  std::vector<ReturnRecord> returns;
  std::optional<Exclusion> excluded_at;

  // Number of bound steps t <= N (a period after a return at N_j covers t = N_j+1..N_j+k_j).
  std::size_t total_bound_time_before(std::size_t N) const;
  friend bool operator==(const BindingLedger&, const BindingLedger&) = default;
};

// c_0..c_len, c_0 = a.
std::vector<double> critical_value_orbit(const ScalarMapParam& p, std::size_t len);

BindingLedger build_ledger(const ScalarMapParam& p, std::size_t N_max, const BindingKnobs& knobs);
BindingLedger build_ledger_from_orbit(double a, const std::vector<double>& orbit,
                                      std::size_t N_max, const BindingKnobs& knobs);

struct BindingTime {
  std::size_t k = 0;
  ReturnCase c = ReturnCase::A;
};

struct BindingOverflow {
  std::size_t N = 0;
  std::size_t max_k = 0;
};

Result<BindingTime, BindingOverflow> binding_time(const ScalarMapParam& p, std::size_t N,
                                                  double delta_sep, std::size_t max_k,
                                                  double delta = 0.1, double alpha_BA = 0.05);

bool check_H(const BindingLedger& ledger, std::size_t N, double alpha_frac);

struct CeEstimate {
  double rate = 0.0;      // (1/n) log |DP^n(a)|
  double tail_min = 0.0;  // min over m in [n/2, n] of (1/m) log |DP^m(a)|
};

struct CriticalHit {
  std::size_t index = 0;
};

Result<CeEstimate, CriticalHit> collet_eckmann_estimate(const ScalarMapParam& p, std::size_t n);

struct ExpansionEstimate {
  double lambda = 0.0;
  bool degenerate = false;  // delta swallows A
  std::size_t points_used = 0;
};

// Minimum one-step expansion |DP| over a uniform grid of n points of
// [-beta, beta] outside (-delta, delta), measured in the metric with density
// 1/sqrt(4 - x^2) (clipped) or in the flat metric.
ExpansionEstimate expansion_outside(const ScalarMapParam& p, double delta, std::size_t n = 20001,
                                    MetricKind metric = MetricKind::Adapted);

struct SelectionWindow {
  RealInterval param_interval;
  std::size_t N = 0;          // time reached
  double curve_length = 0.0;  // |c_N| spread through lo, mid, hi
  bool resolved = false;      // schedules at lo, mid, hi coincide up to N
  // Last time at which the endpoint and midpoint schedules coincided (P2).
  // Windows at the resolution floor keep the midpoint schedule beyond it.
  std::size_t p2_through = 0;
  double center = 0.0;        // representative parameter (the midpoint)
  std::size_t bound_time = 0;
  std::size_t returns = 0;
  std::shared_ptr<const BindingLedger> ledger;  // midpoint ledger
};

struct SelectionReport {
  RealInterval window;
  std::size_t N_max = 0;
  BindingKnobs knobs;          // with defaults resolved
  std::vector<double> survivor_measure;  // index N: measure alive after step N
  double excluded_case_c = 0.0;
  double excluded_H = 0.0;
  double excluded_overflow = 0.0;
  std::size_t excluded_windows = 0;
  std::vector<SelectionWindow> survivors;
  double surviving_measure() const;
};

SelectionReport run_selection(const RealInterval& window, std::size_t N_max,
                              const BindingKnobs& knobs = {}, std::size_t workers = 1);

nlohmann::json to_json(const SelectionReport& r);

}  // namespace puzzleforge
