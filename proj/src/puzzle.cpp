#include "puzzleforge/puzzle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace puzzleforge {

namespace {

void dedup_sorted(std::vector<double>& v, double tol) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v)
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  v.swap(out);
}

std::string describe(const PuzzlePiece& piece) {
  return "[" + std::to_string(piece.interval.lo) + ", " + std::to_string(piece.interval.hi) +
         "] of order " + std::to_string(piece.order);
}

const PuzzlePiece& find_container(const PuzzleLevel& level, const RealInterval& iv,
                                  const std::string& what) {
  const PuzzlePiece* found = nullptr;
  for (const auto& q : level.pieces) {
    const double tol = kDedupTol * (1.0 + std::abs(q.interval.hi));
    if (q.interval.contains(iv, tol)) {
      if (found) throw Unrelated(what + ": containment is not unique");
      found = &q;
    }
  }
  if (!found) throw Unrelated(what + ": no piece of order " + std::to_string(level.order));
  return *found;
}

}  // namespace

std::vector<double> preimage_set(const ScalarMapParam& p, std::size_t n) {
  const auto fp = fixed_points(p);
  const double a = p.a();
  std::vector<double> cur{fp.alpha, -fp.alpha};
  dedup_sorted(cur, kDedupTol);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> next;
    next.reserve(2 * cur.size());
    for (double y : cur) {
      const double d = y - a;
      if (d < 0.0) continue;
      const double r = std::sqrt(d);
      next.push_back(-r);
      next.push_back(r);
    }
    dedup_sorted(next, kDedupTol);
    cur.swap(next);
  }
  std::vector<double> out;
  for (double x : cur)
    if (std::abs(x) <= fp.beta) out.push_back(x);
  return out;
}

PuzzleLevel puzzle_level(const ScalarMapParam& p, std::size_t n) {
  const auto fp = fixed_points(p);
  PuzzleLevel level;
  level.order = n;
  level.cut_points = preimage_set(p, n);
  std::vector<double> ends;
  ends.reserve(level.cut_points.size() + 2);
  ends.push_back(-fp.beta);
  for (double x : level.cut_points)
    if (x - ends.back() > kDedupTol) ends.push_back(x);
  if (fp.beta - ends.back() > kDedupTol)
    ends.push_back(fp.beta);
  else
    ends.back() = fp.beta;
  for (std::size_t i = 0; i + 1 < ends.size(); ++i)
    level.pieces.push_back({RealInterval(ends[i], ends[i + 1]), n, i});
  return level;
}

const PuzzlePiece& parent_piece(const PuzzleLevel& level_n, const PuzzleLevel& level_n_minus_1,
                                const PuzzlePiece& piece) {
  if (level_n.order != level_n_minus_1.order + 1 || piece.order != level_n.order)
    throw Unrelated("parent_piece: orders do not differ by one");
  return find_container(level_n_minus_1, piece.interval, "parent of " + describe(piece));
}

const PuzzlePiece& image_piece(const ScalarMapParam& p, const PuzzleLevel& level_n,
                               const PuzzleLevel& level_n_minus_1, const PuzzlePiece& piece) {
  if (level_n.order != level_n_minus_1.order + 1 || piece.order != level_n.order)
    throw Unrelated("image_piece: orders do not differ by one");
  const auto& iv = piece.interval;
  double lo = std::min(eval_map(p, iv.lo), eval_map(p, iv.hi));
  double hi = std::max(eval_map(p, iv.lo), eval_map(p, iv.hi));
  if (iv.contains(0.0)) lo = std::min(lo, p.a());
  return find_container(level_n_minus_1, RealInterval(lo, hi), "image of " + describe(piece));
}

const PuzzleLevel& PuzzleCache::level(std::size_t n) {
  auto it = levels_.find(n);
  if (it == levels_.end()) it = levels_.emplace(n, puzzle_level(p_, n)).first;
  return it->second;
}

// ---- local refinement ------------------------------------------------------

namespace {

struct Ctx {
  double a;
  double alpha;
  double beta;
};

double landing(const Ctx& c, double target) {
  // Image of a target point: +-alpha -> alpha, +-beta -> beta.
  return std::abs(std::abs(target) - std::abs(c.alpha)) <
                 std::abs(std::abs(target) - c.beta)
             ? c.alpha
             : c.beta;
}

TrackedPoint forward(const Ctx& c, const TrackedPoint& e) {
  if (e.steps < 0) return {e.x * e.x + c.a, -1, 0.0};
  if (e.steps == 0) {
    const double t = landing(c, e.target);
    return {t, 0, t};
  }
  if (e.steps == 1) return {e.target, 0, e.target};
  return {e.x * e.x + c.a, e.steps - 1, e.target};
}

bool on_target(const TrackedPoint& e, double t) { return e.steps == 0 && e.target == t; }

// Points x strictly inside (lo, hi) with P^m(x) in {alpha, -alpha}, increasing.
// Each result is tagged with the number of steps to its target.
void collect(const Ctx& c, const TrackedPoint& lo, const TrackedPoint& hi, int m,
             std::vector<TrackedPoint>& out) {
  if (!(lo.x < hi.x)) return;
  if (m == 0) {
    for (double t : {c.alpha, -c.alpha}) {
      if (on_target(lo, t) || on_target(hi, t)) continue;
      // alpha < -alpha, so the pushes come out increasing.
      if (lo.x < t && t < hi.x) out.push_back({t, 0, t});
    }
    return;
  }
  const TrackedPoint zero{0.0, -1, 0.0};
  auto branch = [&](const TrackedPoint& l, const TrackedPoint& r, int sign) {
    TrackedPoint fl = forward(c, l), fr = forward(c, r);
    if (fl.x > fr.x) std::swap(fl, fr);
    std::vector<TrackedPoint> sub;
    collect(c, fl, fr, m - 1, sub);
    std::vector<TrackedPoint> pulled;
    pulled.reserve(sub.size());
    for (const auto& y : sub) {
      const double d = y.x - c.a;
      if (d <= 0.0) continue;
      pulled.push_back({sign * std::sqrt(d), y.steps + 1, y.target});
    }
    if (sign < 0) std::reverse(pulled.begin(), pulled.end());
    for (auto& q : pulled)
      if (l.x < q.x && q.x < r.x) out.push_back(q);
  };
  if (lo.x < 0.0 && 0.0 < hi.x) {
    branch(lo, zero, -1);
    branch(zero, hi, +1);
  } else {
    branch(lo, hi, (lo.x + hi.x) > 0.0 ? +1 : -1);
  }
}

}  // namespace

TrackedPiece tracked_central_piece(const ScalarMapParam& p) {
  const auto fp = fixed_points(p);
  TrackedPiece piece;
  piece.lo = {fp.alpha, 0, fp.alpha};
  piece.hi = {-fp.alpha, 0, -fp.alpha};
  piece.order = 0;
  return piece;
}

std::vector<TrackedPiece> refine_piece(const ScalarMapParam& p, const TrackedPiece& piece) {
  const auto fp = fixed_points(p);
  const Ctx c{p.a(), fp.alpha, fp.beta};
  std::vector<TrackedPoint> cuts;
  collect(c, piece.lo, piece.hi, static_cast<int>(piece.order) + 1, cuts);
  std::vector<TrackedPiece> out;
  TrackedPoint left = piece.lo;
  const double w = piece.hi.x - piece.lo.x;
  for (const auto& q : cuts) {
    const double tol = std::max(1e-15, 1e-12 * w);
    if (q.x - left.x <= tol || piece.hi.x - q.x <= tol) continue;
    out.push_back({left, q, piece.order + 1});
    left = q;
  }
  out.push_back({left, piece.hi, piece.order + 1});
  return out;
}

}  // namespace puzzleforge
