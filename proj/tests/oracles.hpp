#pragma once
// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using quad = __float128;

// x_{k+1} = x_k^2 + a in 113-bit arithmetic.
inline std::vector<double> quad_orbit(double a, double x0, std::size_t n) {
  std::vector<double> out{x0};
  quad x = x0, qa = a;
  for (std::size_t i = 0; i < n; ++i) {
    x = x * x + qa;
    out.push_back(static_cast<double>(x));
  }
  return out;
}

// Roots of g on [lo, hi] by sign changes on a uniform grid, refined by bisection.
inline std::vector<double> root_scan(const std::function<double(double)>& g, double lo, double hi,
                                     std::size_t grid) {
  std::vector<double> roots;
  double x0 = lo, g0 = g(lo);
  if (g0 == 0.0) roots.push_back(lo);
  for (std::size_t i = 1; i <= grid; ++i) {
    const double x1 = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid);
    const double g1 = g(x1);
    if (g1 == 0.0) {
      roots.push_back(x1);
    } else if ((g0 < 0.0) != (g1 < 0.0) && g0 != 0.0) {
      double a = x0, b = x1, ga = g0;
      for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
        const double m = 0.5 * (a + b), gm = g(m);
        if ((gm < 0.0) == (ga < 0.0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    x0 = x1;
    g0 = g1;
  }
  return roots;
}

inline std::vector<double> dedup(std::vector<double> v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  return out;
}

// Order-n cut points at a = -2 from the conjugacy x = 2 cos(2 pi phi):
// P^n(x) = 2 cos(2 pi 2^n phi) = +-1 iff 2^n phi = r mod 1, r in {1/6, 1/3, 2/3, 5/6}.
inline std::vector<double> chebyshev_cut_points(std::size_t n) {
  std::vector<double> out;
  const double scale = std::ldexp(1.0, static_cast<int>(n));
  for (double r : {1.0 / 6, 1.0 / 3, 2.0 / 3, 5.0 / 6})
    for (double j = 0; (j + r) / scale < 0.5; ++j)
      out.push_back(2.0 * std::cos(2.0 * M_PI * (j + r) / scale));
  return dedup(out, 1e-12);
}

}  // namespace oracle
