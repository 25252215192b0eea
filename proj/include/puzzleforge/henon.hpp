#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "puzzleforge/errors.hpp"

namespace puzzleforge {

struct Vec2 {
  double x = 0.0, y = 0.0;
  double norm() const { return std::hypot(x, y); }
};

struct Mat2 {
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
  double det() const { return a11 * a22 - a12 * a21; }
  Vec2 operator*(const Vec2& v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
};

// Additive smooth field with its differential and a declared uniform C^2 size.
struct Perturbation {
  std::string name;
  std::function<Vec2(double x, double y, double a)> field;
  std::function<Mat2(double x, double y, double a)> differential;
  double c2_size = 0.0;
};

// amplitude * exp(-|z - center|^2 / radius^2) in the first coordinate.
Perturbation bump_perturbation(double amplitude, Vec2 center, double radius);

struct PlaneParams {
  double a = -1.4;
  double b = -0.3;
  std::optional<Perturbation> perturbation;
};

// h(x, y) = (x^2 + a + y, -b x), plus the perturbation if any.
Vec2 henon_step(const PlaneParams& params, double x, double y);

struct Differential {
  Mat2 d;
  double det = 0.0;
};

Differential jacobian(const PlaneParams& params, double x, double y);

struct NoFixedPoints : NumericalError {
  using NumericalError::NumericalError;
};

struct PlaneFixedPoint {
  Vec2 z;
  double lambda_unstable = 0.0;
  double lambda_stable = 0.0;
  Vec2 v_unstable, v_stable;
  bool saddle = false;
  bool is_beta = false;  // unstable eigenvalue positive
};

struct PlaneFixedPoints {
  PlaneFixedPoint alpha, beta;
};

// Unperturbed maps only.
PlaneFixedPoints fixed_points_plane(const PlaneParams& params);

using Polygon = std::vector<Vec2>;

// Henon's 1976 quadrilateral for (X,Y) -> (1 - 1.4 X^2 + Y, 0.3 X), carried to
// these coordinates by (x, y) = -1.4 (X, Y).
Polygon henon_classical_quadrilateral();
Polygon disk_polygon(Vec2 center, double radius, std::size_t sides = 64);

bool point_in_polygon(const Polygon& poly, Vec2 z);
// Distance to the boundary, positive inside.
double signed_distance(const Polygon& poly, Vec2 z);

struct TrappingReport {
  bool pass = false;
  double margin = 0.0;           // min signed distance of sampled images
  double max_penetration = 0.0;  // max(0, -margin)
  std::size_t samples = 0;
};

TrappingReport trapping_check(const PlaneParams& params, const Polygon& region, std::size_t grid);

struct Escaped : NumericalError {
  using NumericalError::NumericalError;
};

struct PlaneLyapunov {
  double lambda1 = 0.0, lambda2 = 0.0;
  std::size_t n = 0;
  double mean_log_det = 0.0;
  double kaplan_yorke() const { return 1.0 + lambda1 / std::abs(lambda2); }
};

// Iterated Gram-Schmidt on the tangent cocycle, starting from the identity frame.
PlaneLyapunov lyapunov_plane(const PlaneParams& params, double x0, double y0, std::size_t n,
                             std::size_t burn_in = 1000, double escape_bound = 1e3);

struct AttractorSample {
  std::vector<Vec2> points;
  std::vector<Vec2> unstable_sweep;
};

struct AttractorOptions {
  std::size_t burn_in = 1000;
  Vec2 start{0.1, 0.0};
  std::size_t sweep_seeds = 2000;
  std::size_t sweep_iterates = 30;
  double escape_bound = 1e3;
};

AttractorSample attractor_sample(const PlaneParams& params, std::size_t n,
                                 const AttractorOptions& options = {});

struct BoxCount {
  double slope = 0.0;
  std::vector<double> eps;
  std::vector<std::size_t> counts;
};

// Least-squares slope of log N(eps) against log(1/eps), eps = span / 2^k.
BoxCount box_counting_dimension(const std::vector<Vec2>& points, int k_min = 4, int k_max = 10);

}  // namespace puzzleforge
