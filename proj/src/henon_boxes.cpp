#include "puzzleforge/henon_boxes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "puzzleforge/parallel.hpp"

namespace puzzleforge {

HenonLikeMap::HenonLikeMap(const PlaneParams& params)
    : a_(params.a),
      s_(std::sqrt(std::abs(params.b))),
      sigma_(params.b < 0.0 ? -1.0 : 1.0),
      extra_(params.perturbation) {
  if (!(std::abs(params.b) < 1.0)) throw InvalidParameter("box machinery needs |b| < 1");
  size_ = s_ + (extra_ ? extra_->c2_size : 0.0);
  if (!(size_ < 1.0)) throw InvalidParameter("C^2 size of B must be < 1 for a finite theta");
  theta_ = size_ > 0.0 ? 1.0 / std::abs(std::log(size_)) : kThetaFallback;
}

Vec2 HenonLikeMap::coupling(Vec2 z) const {
  Vec2 c{s_ * z.y, -sigma_ * s_ * z.x};
  if (extra_) {
    const Vec2 e = extra_->field(z.x, z.y, a_);
    c.x += e.x;
    c.y += e.y;
  }
  return c;
}

Vec2 HenonLikeMap::operator()(Vec2 z) const {
  const Vec2 c = coupling(z);
  return {z.x * z.x + a_ + c.x, c.y};
}

Mat2 HenonLikeMap::differential(Vec2 z) const {
  Mat2 d{2.0 * z.x, s_, -sigma_ * s_, 0.0};
  if (extra_) {
    const Mat2 e = extra_->differential(z.x, z.y, a_);
    d.a11 += e.a11;
    d.a12 += e.a12;
    d.a21 += e.a21;
    d.a22 += e.a22;
  }
  return d;
}

struct PlaneCurve::Spline {
  boost::math::interpolators::cardinal_cubic_b_spline<double> s;
};

PlaneCurve::PlaneCurve(std::vector<double> nodes, double theta)
    : nodes_(std::move(nodes)), theta_(theta) {
  if (nodes_.size() < 4 || !(theta_ > 0.0)) throw std::invalid_argument("PlaneCurve: bad nodes");
  for (double v : nodes_)
    if (!std::isfinite(v)) throw ArcFailure("non-finite curve node");
  const double h = 2.0 * theta_ / static_cast<double>(nodes_.size() - 1);
  spline_ = std::make_shared<const Spline>(
      Spline{{nodes_.data(), nodes_.size(), -theta_, h}});
}

double PlaneCurve::node_w(std::size_t i) const {
  return -theta_ + 2.0 * theta_ * static_cast<double>(i) / static_cast<double>(nodes_.size() - 1);
}

double PlaneCurve::operator()(double w) const {
  return spline_->s(std::clamp(w, -theta_, theta_));
}

double PlaneCurve::slope(double w) const { return spline_->s.prime(std::clamp(w, -theta_, theta_)); }

double PlaneCurve::max_abs_slope() const {
  double m = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) m = std::max(m, std::abs(slope(node_w(i))));
  return m;
}

double sup_distance(const PlaneCurve& u, const PlaneCurve& v) {
  if (u.nodes().size() != v.nodes().size() || u.theta() != v.theta())
    throw std::invalid_argument("sup_distance: curves on different grids");
  double d = 0.0;
  for (std::size_t i = 0; i < u.nodes().size(); ++i)
    d = std::max(d, std::abs(u.nodes()[i] - v.nodes()[i]));
  return d;
}

bool PlaneBox::contains(Vec2 z, double tol) const {
  if (std::abs(z.y) > theta() + tol) return false;
  return left(z.y) - tol <= z.x && z.x <= right(z.y) + tol;
}

PlaneCurve pullback_curve(const HenonLikeMap& f, const PlaneCurve& curve, int sign) {
  const double a = f.a(), theta = curve.theta();
  const double sg = sign > 0 ? 1.0 : -1.0;
  std::vector<double> out(curve.nodes().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double w = curve.node_w(i);
    // Solve x^2 = gamma(w') - a - B1(x, w) with w' = B2(x, w) by fixed-point iteration;
    // the map is a contraction of rate O(|B| / |x|) on the chosen branch.
    double x = 0.0;
    bool done = false;
    for (int it = 0; it < 200 && !done; ++it) {
      const Vec2 c = f.coupling({x, w});
      if (std::abs(c.y) > theta * (1.0 + 1e-12))
        throw PullbackFailure("preimage leaves the curve's domain");
      const double arg = curve(c.y) - a - c.x;
      if (arg < 0.0) throw PullbackFailure("curve lies left of the critical value");
      const double nx = sg * std::sqrt(arg);
      done = nx == x || std::abs(nx - x) <= 1e-16 * std::abs(nx);
      x = nx;
      if (it == 0 && !f.has_extra() && f.scale() == 0.0) done = true;
    }
    if (!done) throw PullbackFailure("branch solve did not converge");
    out[i] = x;
  }
  return PlaneCurve(std::move(out), theta);
}

PlaneBox pullback_box(const HenonLikeMap& f, const PlaneBox& box, const std::vector<int>& signs) {
  PlaneCurve l = box.left, r = box.right;
  for (std::size_t k = signs.size(); k-- > 0;) {
    l = pullback_curve(f, l, signs[k]);
    r = pullback_curve(f, r, signs[k]);
  }
  const std::size_t mid = l.nodes().size() / 2;
  if (l.nodes()[mid] > r.nodes()[mid]) std::swap(l, r);
  return {std::move(l), std::move(r)};
}

PlaneBox build_base_box(const HenonLikeMap& f) {
  const ScalarMapParam p(f.a());
  const FixedPointPair fp = fixed_points(p);
  const double theta = f.theta();
  PlaneCurve left(std::vector<double>(kArcNodes, fp.alpha), theta);
  // Graph transform on the negative branch; contracts at rate ~ 1/|2 alpha|.
  bool converged = false;
  for (int it = 0; it < 400 && !converged; ++it) {
    PlaneCurve next = pullback_curve(f, left, -1);
    converged = sup_distance(next, left) <= 1e-14;
    left = std::move(next);
  }
  if (!converged) throw ArcFailure("stable arc continuation did not converge");
  if (left.max_abs_slope() > theta) throw ArcFailure("stable arc is not nearly vertical");
  PlaneCurve right = pullback_curve(f, left, +1);
  if (right.max_abs_slope() > theta) throw ArcFailure("companion arc is not nearly vertical");
  for (std::size_t i = 0; i < kArcNodes; ++i)
    if (!(left.nodes()[i] < right.nodes()[i])) throw ArcFailure("arcs cross");
  return {std::move(left), std::move(right)};
}

double image_distance(const HenonLikeMap& f, const PlaneCurve& from, const PlaneCurve& to) {
  double d = 0.0;
  for (std::size_t i = 0; i < from.nodes().size(); ++i) {
    const Vec2 z = f({from.nodes()[i], from.node_w(i)});
    if (std::abs(z.y) > to.theta()) return INFINITY;
    d = std::max(d, std::abs(z.x - to(z.y)));
  }
  return d;
}

ExpansionCertificate certify_box(const HenonLikeMap& f, const PlaneBox& base, const PlaneBox& box,
                                 std::size_t order, const CertificateOptions& options) {
  ExpansionCertificate cert;
  cert.c = options.c;
  cert.lambda = options.lambda;
  cert.slope_cap = f.theta();
  cert.samples = options.samples;
  cert.seed = options.seed;
  struct Sample {
    double ratio;
    bool image_ok;
  };
  const double theta = f.theta();
  std::vector<Sample> results(options.samples);
  parallel_for(options.samples, options.workers, [&](std::size_t i) {
    std::seed_seq seq{options.seed, static_cast<std::uint64_t>(i)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double w = -theta + 2.0 * theta * unit(rng);
    const double lo = box.left(w), hi = box.right(w);
    Vec2 z{lo + (hi - lo) * unit(rng), w};
    Vec2 v{1.0, -theta + 2.0 * theta * unit(rng)};
    std::vector<double> norms{v.norm()};
    for (std::size_t k = 0; k < order; ++k) {
      v = f.differential(z) * v;
      z = f(z);
      norms.push_back(v.norm());
    }
    double ratio = INFINITY;
    for (std::size_t k = 0; k < order; ++k)
      ratio = std::min(ratio, norms[order] / (norms[k] * std::pow(options.lambda,
                                                                   static_cast<double>(order - k))));
    results[i] = Sample{ratio, base.contains(z, 1e-8)};
  });
  cert.min_ratio = INFINITY;
  for (const auto& s : results) {
    cert.min_ratio = std::min(cert.min_ratio, s.ratio);
    if (!s.image_ok) ++cert.image_failures;
  }
  cert.passed = cert.min_ratio >= options.c && cert.image_failures == 0;
  return cert;
}

namespace {

// Forward image of an arc after n steps, checked against either arc of Y_e.
bool lands_on_base_arcs(const HenonLikeMap& f, const PlaneBox& base, const PlaneCurve& arc,
                        std::size_t n) {
  for (std::size_t i = 0; i < arc.nodes().size(); i += 8) {
    Vec2 z{arc.nodes()[i], arc.node_w(i)};
    for (std::size_t k = 0; k < n; ++k) z = f(z);
    if (std::abs(z.y) > base.theta() + kCurveTol) return false;
    const double d = std::min(std::abs(z.x - base.left(z.y)), std::abs(z.x - base.right(z.y)));
    // Forward iteration amplifies rounding by roughly 2^n.
    if (d > kCurveTol * std::max(1.0, std::ldexp(1.0, static_cast<int>(n)) * 1e-6)) return false;
  }
  return true;
}

}  // namespace

PlanePiece make_piece(const HenonLikeMap& f, const PlaneBox& base, std::vector<int> signs,
                      const CertificateOptions& options) {
  PlanePiece piece{pullback_box(f, base, signs), signs.size(), std::move(signs), {}, false};
  piece.certificate = certify_box(f, base, piece.box, piece.order, options);
  piece.puzzle = lands_on_base_arcs(f, base, piece.box.left, piece.order) &&
                 lands_on_base_arcs(f, base, piece.box.right, piece.order);
  return piece;
}

Result<PlanePiece, NotAdmissible> star_product(const HenonLikeMap& f, const PlaneBox& base,
                                               const PlanePiece& p1, const PlanePiece& p2,
                                               const CertificateOptions& options) {
  for (std::size_t i = 0; i < kArcNodes; ++i) {
    const double tol = kCurveTol;
    if (p2.box.left.nodes()[i] < base.left.nodes()[i] - tol ||
        p2.box.right.nodes()[i] > base.right.nodes()[i] + tol)
      return NotAdmissible{"second factor is not inside the base box"};
  }
  PlaneBox pulled = pullback_box(f, p2.box, p1.signs);
  std::vector<double> lo(kArcNodes), hi(kArcNodes);
  double widest = 0.0;
  for (std::size_t i = 0; i < kArcNodes; ++i) {
    lo[i] = std::max(pulled.left.nodes()[i], p1.box.left.nodes()[i]);
    hi[i] = std::min(pulled.right.nodes()[i], p1.box.right.nodes()[i]);
    if (hi[i] < lo[i] - kCurveTol) return NotAdmissible{"pullback leaves the first factor"};
    widest = std::max(widest, hi[i] - lo[i]);
  }
  if (widest <= kCurveTol * 1e-4)
    return NotAdmissible{"pullback collapses onto a single stable arc"};
  std::vector<int> signs = p1.signs;
  signs.insert(signs.end(), p2.signs.begin(), p2.signs.end());
  PlanePiece out{{PlaneCurve(std::move(lo), f.theta()), PlaneCurve(std::move(hi), f.theta())},
                 p1.order + p2.order, std::move(signs), {}, false};
  out.certificate = certify_box(f, base, out.box, out.order, options);
  out.puzzle = lands_on_base_arcs(f, base, out.box.left, out.order) &&
               lands_on_base_arcs(f, base, out.box.right, out.order);
  return out;
}

SimplePieceSet simple_pieces(const HenonLikeMap& f, const CertificateOptions& options, double kappa) {
  const ScalarMapParam p(f.a());
  const SimpleCover sc = simple_intervals(p, kappa, {options.workers});
  const std::size_t M = sc.return_time - 1;
  const std::size_t expected = 2 * M - 2;
  if (sc.intervals.size() != expected)
    throw CountMismatch("simple piece count " + std::to_string(sc.intervals.size()) +
                        " != 2M-2 = " + std::to_string(expected));
  PlaneBox base = build_base_box(f);
  SimplePieceSet out{base, {}, base, M, 0.0, 0.0};
  for (const auto& r : sc.intervals) out.pieces.push_back(make_piece(f, out.base, r.branch_certificate, options));
  std::sort(out.pieces.begin(), out.pieces.end(), [](const PlanePiece& u, const PlanePiece& v) {
    return u.box.left.nodes()[kArcNodes / 2] < v.box.left.nodes()[kArcNodes / 2];
  });
  const PlanePiece* neg = nullptr;
  const PlanePiece* pos = nullptr;
  for (const auto& pc : out.pieces) {
    const double x = pc.box.left.nodes()[kArcNodes / 2];
    if (x < 0.0) neg = &pc;
    else if (!pos) pos = &pc;
  }
  if (!neg || !pos) throw CountMismatch("no simple pieces on one side of the critical line");
  out.central = {neg->box.right, pos->box.left};
  out.central_width = out.central.width_at(0.0);
  out.width_ratio = out.central_width / std::ldexp(1.0, -static_cast<int>(M));
  return out;
}

nlohmann::json to_json(const PlaneCurve& c) {
  return {{"theta", c.theta()}, {"nodes", c.nodes()}};
}

nlohmann::json to_json(const PlaneBox& b) {
  return {{"left", to_json(b.left)}, {"right", to_json(b.right)}};
}

nlohmann::json to_json(const PlanePiece& p) {
  const auto& c = p.certificate;
  return {{"order", p.order},
          {"signs", p.signs},
          {"puzzle", p.puzzle},
          {"box", to_json(p.box)},
          {"certificate",
           {{"c", c.c},
            {"lambda", c.lambda},
            {"slope_cap", c.slope_cap},
            {"samples", c.samples},
            {"seed", c.seed},
            {"min_ratio", c.min_ratio},
            {"image_failures", c.image_failures},
            {"passed", c.passed}}}};
}

nlohmann::json to_json(const SimplePieceSet& s) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : s.pieces) pieces.push_back(to_json(p));
  return {{"return_time", s.return_time},
          {"count", s.pieces.size()},
          {"central_width", s.central_width},
          {"width_ratio", s.width_ratio},
          {"base", to_json(s.base)},
          {"central", to_json(s.central)},
          {"pieces", pieces}};
}

}  // namespace puzzleforge
