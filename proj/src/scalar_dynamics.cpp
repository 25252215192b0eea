#include "puzzleforge/scalar_dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace puzzleforge {

ScalarMapParam::ScalarMapParam(double a) : a_(a) {
  if (!(a >= -2.0 && a <= 0.25))
    throw InvalidParameter("parameter a=" + std::to_string(a) + " outside [-2, 1/4]");
}

FixedPointPair fixed_points(const ScalarMapParam& p) {
  const double disc = 1.0 - 4.0 * p.a();
  if (disc < 0.0) throw NoRealFixedPoints("1 - 4a < 0");
  const double r = std::sqrt(disc);
  return {0.5 * (1.0 - r), 0.5 * (1.0 + r)};
}

RealInterval invariant_core(const ScalarMapParam& p) {
  const double a = p.a();
  if (a < -2.0 || a > -1.0)
    throw NotInvariant("invariant core needs a in [-2, -1], got " + std::to_string(a));
  RealInterval core(a, a * a + a);
  // P is monotone on each side of 0, so the image of the core is [a, max(P(lo), P(hi))].
  const double top = std::max(eval_map(p, core.lo), eval_map(p, core.hi));
  if (top > core.hi + 1e-12 * (1.0 + std::abs(core.hi)))
    throw NotInvariant("image of the core leaves the core");
  return core;
}

RealInterval central_interval(const ScalarMapParam& p) {
  const auto fp = fixed_points(p);
  return RealInterval(std::min(fp.alpha, -fp.alpha), std::max(fp.alpha, -fp.alpha));
}

RealInterval dynamic_interval(const ScalarMapParam& p) {
  const auto fp = fixed_points(p);
  return RealInterval(-fp.beta, fp.beta);
}

OrbitSegment orbit_with_derivative(const ScalarMapParam& p, double x0, std::size_t n) {
  if (n < 1) throw std::invalid_argument("orbit_with_derivative needs n >= 1");
  OrbitSegment seg;
  seg.start = x0;
  seg.values.reserve(n + 1);
  seg.log_derivative_partial_sums.reserve(n);
  seg.values.push_back(x0);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = seg.values.back();
    if (x == 0.0 && !seg.zero_hit) seg.zero_hit = i;
    if (seg.zero_hit)
      sum = -std::numeric_limits<double>::infinity();
    else
      sum += std::log(std::abs(2.0 * x));
    seg.log_derivative_partial_sums.push_back(sum);
    seg.values.push_back(eval_map(p, x));
  }
  if (!seg.zero_hit && seg.values.back() == 0.0) seg.zero_hit = n;
  return seg;
}

std::optional<std::size_t> critical_return_time(const ScalarMapParam& p, std::size_t max_steps,
                                                ReturnConvention convention) {
  const auto fp = fixed_points(p);
  const double lo = fp.alpha, hi = -fp.alpha;
  double x = 0.0;
  for (std::size_t m = 1; m <= max_steps; ++m) {
    x = eval_map(p, x);
    // Open interval: landing exactly on +-alpha is not a return.
    if (lo < x && x < hi)
      return convention == ReturnConvention::CriticalPoint ? m : m - 1;
  }
  return std::nullopt;
}

}  // namespace puzzleforge
