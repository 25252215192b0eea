#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "puzzleforge/errors.hpp"
#include "puzzleforge/interval.hpp"

namespace puzzleforge {

inline constexpr double kFixedPointTol = 1e-12;

// Parameter of P_a(x) = x^2 + a, restricted to the range with real fixed points.
class ScalarMapParam {
 public:
  explicit ScalarMapParam(double a);
  double a() const noexcept { return a_; }

 private:
  double a_;
};

inline double eval_map(const ScalarMapParam& p, double x) noexcept { return x * x + p.a(); }

struct NoRealFixedPoints : NumericalError {
  using NumericalError::NumericalError;
};

struct NotInvariant : ConfigError {
  using ConfigError::ConfigError;
};

struct FixedPointPair {
  double alpha;  // (1 - sqrt(1-4a))/2
  double beta;   // (1 + sqrt(1-4a))/2
};

FixedPointPair fixed_points(const ScalarMapParam& p);

// [a, a^2 + a], invariant for a in [-2, -1].
RealInterval invariant_core(const ScalarMapParam& p);

// A = [alpha, -alpha].
RealInterval central_interval(const ScalarMapParam& p);

// [-beta, beta], the interval on which puzzle pieces live.
RealInterval dynamic_interval(const ScalarMapParam& p);

struct OrbitSegment {
  double start = 0.0;
  std::vector<double> values;                      // n + 1 points, values[0] = start
  std::vector<double> log_derivative_partial_sums; // entry k is sum_{i<=k} log|2 values[i]|
  std::optional<std::size_t> zero_hit;             // first index with values[i] == 0
};

OrbitSegment orbit_with_derivative(const ScalarMapParam& p, double x0, std::size_t n);

// Which orbit the return time is counted along. CriticalPoint: first M >= 1
// with P^M(0) in (alpha, -alpha). CriticalValue: the same event counted from
// a = P(0), i.e. one less.
enum class ReturnConvention { CriticalPoint, CriticalValue };

std::optional<std::size_t> critical_return_time(
    const ScalarMapParam& p, std::size_t max_steps,
    ReturnConvention convention = ReturnConvention::CriticalPoint);

}  // namespace puzzleforge
