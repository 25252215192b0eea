#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "puzzleforge/errors.hpp"
#include "puzzleforge/henon.hpp"
#include "puzzleforge/regular_cover.hpp"

namespace puzzleforge {

inline constexpr std::size_t kArcNodes = 512;
inline constexpr double kCurveTol = 1e-8;
inline constexpr double kThetaFallback = 0.1;

struct ArcFailure : NumericalError {
  using NumericalError::NumericalError;
};
struct PullbackFailure : NumericalError {
  using NumericalError::NumericalError;
};
struct CountMismatch : NumericalError {
  using NumericalError::NumericalError;
};

// h_ab written in w = y / s, s = sqrt|b|:
//   f(x, w) = (x^2 + a + s w, -sgn(b) s x) + E(x, w),
// so f = (x^2 + a, 0) + B with |B|_{C^2} = s + |E|. The optional perturbation
// of PlaneParams is read as E, already in these coordinates.
class HenonLikeMap {
 public:
  explicit HenonLikeMap(const PlaneParams& params);

  double a() const noexcept { return a_; }
  double scale() const noexcept { return s_; }
  double c2_size() const noexcept { return size_; }
  double theta() const noexcept { return theta_; }
  bool has_extra() const noexcept { return extra_.has_value(); }

  Vec2 operator()(Vec2 z) const;
  Mat2 differential(Vec2 z) const;
  // B evaluated at z (everything but x^2 + a).
  Vec2 coupling(Vec2 z) const;

 private:
  double a_, s_, sigma_, size_, theta_;
  std::optional<Perturbation> extra_;
};

// Graph x = gamma(w) over w in [-theta, theta], cubic B-spline through
// kArcNodes equally spaced nodes.
class PlaneCurve {
 public:
  PlaneCurve(std::vector<double> nodes, double theta);

  double operator()(double w) const;
  double slope(double w) const;
  double node_w(std::size_t i) const;
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  double theta() const noexcept { return theta_; }
  double max_abs_slope() const;

 private:
  struct Spline;
  std::vector<double> nodes_;
  double theta_;
  std::shared_ptr<const Spline> spline_;
};

double sup_distance(const PlaneCurve& u, const PlaneCurve& v);

struct PlaneBox {
  PlaneCurve left, right;

  double theta() const noexcept { return left.theta(); }
  double width_at(double w) const { return right(w) - left(w); }
  bool contains(Vec2 z, double tol = 0.0) const;
};

// Preimage of the curve under the branch of f with sign(x) = sign.
PlaneCurve pullback_curve(const HenonLikeMap& f, const PlaneCurve& curve, int sign);
// Pulls both arcs back along signs (signs[0] is applied last) and reorders.
PlaneBox pullback_box(const HenonLikeMap& f, const PlaneBox& box, const std::vector<int>& signs);

// Y_e: local stable arcs of the fixed point near (alpha, 0) and of its
// companion near (-alpha, 0).
PlaneBox build_base_box(const HenonLikeMap& f);

// sup over nodes of the horizontal distance from f(from) to the curve `to`.
double image_distance(const HenonLikeMap& f, const PlaneCurve& from, const PlaneCurve& to);

struct CertificateOptions {
  double c = 0.1;
  double lambda = 1.5;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

// Sampled check that for nearly horizontal u = (1, t), |t| <= theta, and
// v_k = Df^k(z) u:  |v_n| >= c lambda^(n-k) |v_k| for 0 <= k < n, together
// with f^n(z) in Y_e.
struct ExpansionCertificate {
  double c = 0.1, lambda = 1.5, slope_cap = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double min_ratio = 0.0;  // min of |v_n| / (|v_k| lambda^(n-k))
  std::size_t image_failures = 0;
  bool passed = false;
};

ExpansionCertificate certify_box(const HenonLikeMap& f, const PlaneBox& base, const PlaneBox& box,
                                 std::size_t order, const CertificateOptions& options);

struct PlanePiece {
  PlaneBox box;
  std::size_t order = 0;
  std::vector<int> signs;
  ExpansionCertificate certificate;
  bool puzzle = false;  // f^n of both arcs lies on the arcs of Y_e (sampled)
};

PlanePiece make_piece(const HenonLikeMap& f, const PlaneBox& base, std::vector<int> signs,
                      const CertificateOptions& options);

struct NotAdmissible {
  std::string reason;
};

// (Y, n) * (Y', n') = (f^-n(Y') cap Y, n + n').
Result<PlanePiece, NotAdmissible> star_product(const HenonLikeMap& f, const PlaneBox& base,
                                               const PlanePiece& p1, const PlanePiece& p2,
                                               const CertificateOptions& options);

struct SimplePieceSet {
  PlaneBox base;
  std::vector<PlanePiece> pieces;  // left to right
  PlaneBox central;                // the complementary box around x = 0
  std::size_t return_time = 0;     // M, critical-value convention
  double central_width = 0.0;      // at w = 0
  double width_ratio = 0.0;        // central_width / 2^-M
};

SimplePieceSet simple_pieces(const HenonLikeMap& f, const CertificateOptions& options = {},
                             double kappa = kDefaultKappa);

nlohmann::json to_json(const PlaneCurve& c);
nlohmann::json to_json(const PlaneBox& b);
nlohmann::json to_json(const PlanePiece& p);
nlohmann::json to_json(const SimplePieceSet& s);

}  // namespace puzzleforge
