#include "puzzleforge/henon.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace puzzleforge {

Perturbation bump_perturbation(double amplitude, Vec2 center, double radius) {
  Perturbation p;
  p.name = "bump";
  const double r2 = radius * radius;
  p.field = [=](double x, double y, double) {
    const double dx = x - center.x, dy = y - center.y;
    return Vec2{amplitude * std::exp(-(dx * dx + dy * dy) / r2), 0.0};
  };
  p.differential = [=](double x, double y, double) {
    const double dx = x - center.x, dy = y - center.y;
    const double g = amplitude * std::exp(-(dx * dx + dy * dy) / r2);
    return Mat2{-2.0 * dx / r2 * g, -2.0 * dy / r2 * g, 0.0, 0.0};
  };
  // sup of |g|, |Dg|, |D^2 g| for the gaussian bump, crude upper bound.
  p.c2_size = std::abs(amplitude) * std::max({1.0, 2.0 / radius, 6.0 / r2});
  return p;
}

Vec2 henon_step(const PlaneParams& params, double x, double y) {
  Vec2 out{x * x + params.a + y, -params.b * x};
  if (params.perturbation) {
    const Vec2 e = params.perturbation->field(x, y, params.a);
    out.x += e.x;
    out.y += e.y;
  }
  return out;
}

Differential jacobian(const PlaneParams& params, double x, double y) {
  Mat2 d{2.0 * x, 1.0, -params.b, 0.0};
  if (params.perturbation) {
    const Mat2 e = params.perturbation->differential(x, y, params.a);
    d.a11 += e.a11;
    d.a12 += e.a12;
    d.a21 += e.a21;
    d.a22 += e.a22;
  }
  return {d, d.det()};
}

PlaneFixedPoints fixed_points_plane(const PlaneParams& params) {
  if (params.perturbation) throw std::invalid_argument("fixed_points_plane needs B = 0");
  const double a = params.a, b = params.b;
  const double disc = (1.0 + b) * (1.0 + b) - 4.0 * a;
  if (disc < 0.0) throw NoFixedPoints("(1+b)^2 - 4a < 0");
  const double r = std::sqrt(disc);
  auto make = [&](double x) {
    PlaneFixedPoint fp;
    fp.z = {x, -b * x};
    // Eigenvalues of [[2x, 1], [-b, 0]]: l^2 - 2x l + b = 0.
    const double q = x * x - b;
    if (q < 0.0) throw NoFixedPoints("complex eigenvalues at a fixed point");
    const double s = std::sqrt(q);
    const double l1 = x + s, l2 = x - s;
    const bool first = std::abs(l1) >= std::abs(l2);
    fp.lambda_unstable = first ? l1 : l2;
    fp.lambda_stable = first ? l2 : l1;
    // (A - l I) v = 0 with A = [[2x,1],[-b,0]]  =>  v = (1, l - 2x).
    auto ev = [&](double l) {
      Vec2 v{1.0, l - 2.0 * x};
      const double n = v.norm();
      return Vec2{v.x / n, v.y / n};
    };
    fp.v_unstable = ev(fp.lambda_unstable);
    fp.v_stable = ev(fp.lambda_stable);
    fp.saddle = std::abs(fp.lambda_unstable) > 1.0 && std::abs(fp.lambda_stable) < 1.0;
    fp.is_beta = fp.lambda_unstable > 0.0;
    return fp;
  };
  const auto u = make(0.5 * ((1.0 + b) + r));
  const auto v = make(0.5 * ((1.0 + b) - r));
  if (u.is_beta == v.is_beta)
    throw NoFixedPoints("fixed points do not split into alpha/beta by unstable sign");
  return u.is_beta ? PlaneFixedPoints{v, u} : PlaneFixedPoints{u, v};
}

Polygon henon_classical_quadrilateral() {
  const Vec2 classic[] = {{-1.33, 0.42}, {1.32, 0.133}, {1.245, -0.14}, {-1.06, -0.5}};
  Polygon p;
  for (const auto& v : classic) p.push_back({-1.4 * v.x, -1.4 * v.y});
  return p;
}

Polygon disk_polygon(Vec2 center, double radius, std::size_t sides) {
  Polygon p;
  for (std::size_t i = 0; i < sides; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(sides);
    p.push_back({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
  }
  return p;
}

bool point_in_polygon(const Polygon& poly, Vec2 z) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 &p = poly[i], &q = poly[j];
    if ((p.y > z.y) != (q.y > z.y)) {
      const double xc = p.x + (z.y - p.y) * (q.x - p.x) / (q.y - p.y);
      if (z.x < xc) inside = !inside;
    }
  }
  return inside;
}

double signed_distance(const Polygon& poly, Vec2 z) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
    const double ex = q.x - p.x, ey = q.y - p.y;
    const double t = std::clamp(((z.x - p.x) * ex + (z.y - p.y) * ey) / (ex * ex + ey * ey), 0.0, 1.0);
    d = std::min(d, std::hypot(z.x - (p.x + t * ex), z.y - (p.y + t * ey)));
  }
  return point_in_polygon(poly, z) ? d : -d;
}

TrappingReport trapping_check(const PlaneParams& params, const Polygon& region, std::size_t grid) {
  if (region.size() < 3 || grid < 2) throw std::invalid_argument("trapping_check: bad input");
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& v : region) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  TrappingReport rep;
  rep.margin = std::numeric_limits<double>::infinity();
  auto probe = [&](Vec2 z) {
    const Vec2 w = henon_step(params, z.x, z.y);
    rep.margin = std::min(rep.margin, signed_distance(region, w));
    ++rep.samples;
  };
  const double g = static_cast<double>(grid - 1);
  for (std::size_t i = 0; i < grid; ++i)
    for (std::size_t j = 0; j < grid; ++j) {
      const Vec2 z{xmin + (xmax - xmin) * static_cast<double>(i) / g,
                   ymin + (ymax - ymin) * static_cast<double>(j) / g};
      if (point_in_polygon(region, z)) probe(z);
    }
  // The boundary is where trapping is tightest; sample it at the same density.
  for (std::size_t e = 0; e < region.size(); ++e) {
    const Vec2 p = region[e], q = region[(e + 1) % region.size()];
    for (std::size_t i = 0; i < grid; ++i) {
      const double t = static_cast<double>(i) / g;
      probe({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  rep.pass = rep.margin > 0.0;
  rep.max_penetration = std::max(0.0, -rep.margin);
  return rep;
}

namespace {

// Neumaier compensated sum.
struct Accumulator {
  double s = 0.0, c = 0.0;
  void add(double v) {
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

}  // namespace

PlaneLyapunov lyapunov_plane(const PlaneParams& params, double x0, double y0, std::size_t n,
                             std::size_t burn_in, double escape_bound) {
  if (n < 1) throw std::invalid_argument("lyapunov_plane needs n >= 1");
  Vec2 z{x0, y0};
  auto check = [&](std::size_t i) {
    if (!(std::abs(z.x) <= escape_bound && std::abs(z.y) <= escape_bound))
      throw Escaped("orbit left the bound at step " + std::to_string(i));
  };
  for (std::size_t i = 0; i < burn_in; ++i) {
    z = henon_step(params, z.x, z.y);
    check(i);
  }
  Vec2 q1{1.0, 0.0}, q2{0.0, 1.0};
  Accumulator s1, s2, sdet;
  bool collapsed = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto D = jacobian(params, z.x, z.y);
    sdet.add(std::log(std::abs(D.det)));
    Vec2 v1 = D.d * q1;
    const double r11 = v1.norm();
    q1 = {v1.x / r11, v1.y / r11};
    s1.add(std::log(r11));
    if (!collapsed) {
      Vec2 v2 = D.d * q2;
      const double r12 = q1.x * v2.x + q1.y * v2.y;
      v2 = {v2.x - r12 * q1.x, v2.y - r12 * q1.y};
      const double r22 = v2.norm();
      if (r22 == 0.0) {
        collapsed = true;  // singular differential (b = 0): second exponent is -inf
      } else {
        q2 = {v2.x / r22, v2.y / r22};
        s2.add(std::log(r22));
      }
    }
    if (collapsed) q2 = {-q1.y, q1.x};
    z = henon_step(params, z.x, z.y);
    check(burn_in + i);
  }
  PlaneLyapunov out;
  out.n = n;
  out.lambda1 = s1.value() / static_cast<double>(n);
  out.lambda2 = collapsed ? -std::numeric_limits<double>::infinity() : s2.value() / static_cast<double>(n);
  out.mean_log_det = sdet.value() / static_cast<double>(n);
  if (out.lambda2 > out.lambda1) std::swap(out.lambda1, out.lambda2);
  return out;
}

AttractorSample attractor_sample(const PlaneParams& params, std::size_t n,
                                 const AttractorOptions& options) {
  AttractorSample out;
  Vec2 z = options.start;
  auto check = [&](const Vec2& w) {
    if (!(std::abs(w.x) <= options.escape_bound && std::abs(w.y) <= options.escape_bound))
      throw Escaped("attractor orbit escaped");
  };
  for (std::size_t i = 0; i < options.burn_in; ++i) {
    z = henon_step(params, z.x, z.y);
    check(z);
  }
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.points.push_back(z);
    z = henon_step(params, z.x, z.y);
    check(z);
  }
  if (options.sweep_seeds > 0 && !params.perturbation) {
    const auto fps = fixed_points_plane(params);
    const auto& al = fps.alpha;
    // One fundamental domain of the unstable branch, for lambda^2 > 0.
    const double s0 = 1e-8;
    const double span = std::log(al.lambda_unstable * al.lambda_unstable);
    for (std::size_t i = 0; i < options.sweep_seeds; ++i) {
      const double s = s0 * std::exp(span * static_cast<double>(i) /
                                     static_cast<double>(options.sweep_seeds));
      Vec2 w{al.z.x + s * al.v_unstable.x, al.z.y + s * al.v_unstable.y};
      for (std::size_t k = 0; k < options.sweep_iterates; ++k) {
        w = henon_step(params, w.x, w.y);
        if (!(std::abs(w.x) <= options.escape_bound && std::abs(w.y) <= options.escape_bound)) break;
        out.unstable_sweep.push_back(w);
      }
    }
  }
  return out;
}

BoxCount box_counting_dimension(const std::vector<Vec2>& points, int k_min, int k_max) {
  if (points.empty() || k_min < 0 || k_max <= k_min || k_max > 30)
    throw std::invalid_argument("box_counting_dimension: bad input");
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& v : points) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  BoxCount bc;
  std::vector<std::uint64_t> keys(points.size());
  for (int k = k_min; k <= k_max; ++k) {
    const double eps = span / std::ldexp(1.0, k);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto ix = static_cast<std::uint64_t>((points[i].x - xmin) / eps);
      const auto iy = static_cast<std::uint64_t>((points[i].y - ymin) / eps);
      keys[i] = (ix << 32) | iy;
    }
    std::sort(keys.begin(), keys.end());
    const auto count = static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
    bc.eps.push_back(eps);
    bc.counts.push_back(count);
  }
  const double m = static_cast<double>(bc.eps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < bc.eps.size(); ++i) {
    const double x = std::log(1.0 / bc.eps[i]), y = std::log(static_cast<double>(bc.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  bc.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return bc;
}

}  // namespace puzzleforge
