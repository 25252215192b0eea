#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace puzzleforge {

// Closed interval [lo, hi] of the real line.
struct RealInterval {
  double lo = 0.0;
  double hi = 0.0;

  RealInterval() = default;
  RealInterval(double l, double h) : lo(l), hi(h) {
    if (!(l <= h)) throw std::invalid_argument("RealInterval requires lo <= hi");
  }

  double length() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  bool interior_contains(double x) const noexcept { return lo < x && x < hi; }

  // Containment up to an absolute slack on both ends.
  bool contains(const RealInterval& o, double tol = 0.0) const noexcept {
    return o.lo >= lo - tol && o.hi <= hi + tol;
  }

  friend bool operator==(const RealInterval&, const RealInterval&) = default;
};

inline RealInterval hull(double x, double y) {
  return RealInterval(std::min(x, y), std::max(x, y));
}

inline RealInterval enlarge(const RealInterval& iv, double by) {
  return RealInterval(iv.lo - by, iv.hi + by);
}

}  // namespace puzzleforge
