#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "puzzleforge/errors.hpp"
#include "puzzleforge/interval.hpp"
#include "puzzleforge/puzzle.hpp"
#include "puzzleforge/scalar_dynamics.hpp"

namespace puzzleforge {

inline constexpr double kDefaultKappa = 0.05;
inline constexpr std::size_t kReturnSearchSteps = 1000;

struct RegularInterval {
  PuzzlePiece piece;
  std::size_t order = 0;
  bool is_simple = false;
  // sign of P^k(piece) for k = 0..order-1; +1 right of 0, -1 left of it.
  std::vector<int> branch_certificate;

  const RealInterval& interval() const noexcept { return piece.interval; }
};

enum class RegularityFailure {
  NotOntoA,          // (a) P^n(piece) is not A
  CriticalInterior,  // (b) some P^k(piece), k < n, has 0 in its interior
  NoExtension        // (c) the inverse branch does not extend over the enlarged A
};

struct NotRegular {
  RegularityFailure reason;
  std::size_t step = 0;
  std::string describe() const;
};

// A enlarged by kappa * |A|/2 on both sides.
RealInterval enlarged_central_interval(const ScalarMapParam& p, double kappa);

// Pulls `target` back along the inverse branches selected by `signs`
// (signs[k] is the side of 0 for the k-th image). Fails if some intermediate
// interval reaches the critical value a.
std::optional<RealInterval> pullback_along(const ScalarMapParam& p, const RealInterval& target,
                                           const std::vector<int>& signs);

Result<RegularInterval, NotRegular> is_regular(const ScalarMapParam& p, const PuzzlePiece& piece,
                                               double kappa = kDefaultKappa);

struct CoverReport {
  std::size_t order_cap = 0;
  double kappa = kDefaultKappa;
  double central_length = 0.0;           // |A|
  std::vector<double> uncovered_measure; // entry n-1 is the uncovered length at order n
  double fitted_rate = 0.0;
  std::vector<RegularInterval> regular_intervals;  // maximal, sorted by position
  std::optional<std::size_t> return_time;          // critical-point convention
  std::size_t pieces_visited = 0;
};

struct CoverOptions {
  std::size_t workers = 1;
  std::size_t max_pieces = 20'000'000;  // ResourceError beyond this
};

CoverReport enumerate_regular(const ScalarMapParam& p, std::size_t order_cap,
                              double kappa = kDefaultKappa, const CoverOptions& options = {});

// The regular interval of lowest order <= order_cap containing x, found from
// the orbit of x. Agrees with enumerate_regular up to measure-zero boundaries.
std::optional<RegularInterval> regular_interval_containing(const ScalarMapParam& p, double x,
                                                           std::size_t order_cap,
                                                           double kappa = kDefaultKappa);

struct GapNotCentral : NumericalError {
  using NumericalError::NumericalError;
};

struct NoReturnTime : NumericalError {
  using NumericalError::NumericalError;
};

struct SimpleCover {
  std::vector<RegularInterval> intervals;
  RealInterval central_gap;
  std::size_t return_time = 0;  // critical-point convention
};

SimpleCover simple_intervals(const ScalarMapParam& p, double kappa = kDefaultKappa,
                             const CoverOptions& options = {});

// True when M is finite and the critical orbit before its first return stays
// out of the collar between A and its kappa-enlargement. Outside this regime
// the innermost simple intervals lose their extension and the simple count
// drops below 2M - 2 (critical-value M).
bool is_admissible(const ScalarMapParam& p, double kappa = kDefaultKappa);

// sup |DP^n| / inf |DP^n| over `samples` evenly spaced interior points.
double distortion(const ScalarMapParam& p, const RegularInterval& r, std::size_t samples = 257);

nlohmann::json to_json(const CoverReport& report);
nlohmann::json to_json(const RegularInterval& r);

}  // namespace puzzleforge
