#include "puzzleforge/regular_cover.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>

#include "puzzleforge/parallel.hpp"

namespace puzzleforge {

std::string NotRegular::describe() const {
  switch (reason) {
    case RegularityFailure::NotOntoA:
      return "image is not A";
    case RegularityFailure::CriticalInterior:
      return "critical point interior at step " + std::to_string(step);
    case RegularityFailure::NoExtension:
      return "inverse branch does not extend over the enlarged A";
  }
  return "unknown";
}

RealInterval enlarged_central_interval(const ScalarMapParam& p, double kappa) {
  const auto A = central_interval(p);
  return enlarge(A, kappa * 0.5 * A.length());
}

std::optional<RealInterval> pullback_along(const ScalarMapParam& p, const RealInterval& target,
                                           const std::vector<int>& signs) {
  const double a = p.a();
  double lo = target.lo, hi = target.hi;
  for (std::size_t k = signs.size(); k-- > 0;) {
    if (!(lo - a > 0.0)) return std::nullopt;
    const double rl = std::sqrt(lo - a), rh = std::sqrt(hi - a);
    if (signs[k] > 0) {
      lo = rl;
      hi = rh;
    } else {
      lo = -rh;
      hi = -rl;
    }
  }
  return RealInterval(lo, hi);
}

namespace {

double match_tol(const RealInterval& iv) {
  return std::max(1e-15 * (1.0 + std::abs(iv.hi) + std::abs(iv.lo)),
                  std::min(kDedupTol, 1e-6 * iv.length()));
}

}  // namespace

Result<RegularInterval, NotRegular> is_regular(const ScalarMapParam& p, const PuzzlePiece& piece,
                                               double kappa) {
  const std::size_t n = piece.order;
  if (n < 1) throw std::invalid_argument("is_regular needs a piece of order >= 1");
  std::vector<int> signs;
  signs.reserve(n);
  double lo = piece.interval.lo, hi = piece.interval.hi;
  for (std::size_t k = 0; k < n; ++k) {
    if (lo < 0.0 && 0.0 < hi) return NotRegular{RegularityFailure::CriticalInterior, k};
    signs.push_back(lo + hi > 0.0 ? +1 : -1);
    const double u = eval_map(p, lo), v = eval_map(p, hi);
    lo = std::min(u, v);
    hi = std::max(u, v);
  }
  const auto J = pullback_along(p, central_interval(p), signs);
  const double tol = match_tol(piece.interval);
  if (!J || std::abs(J->lo - piece.interval.lo) > tol || std::abs(J->hi - piece.interval.hi) > tol)
    return NotRegular{RegularityFailure::NotOntoA, n};
  if (!pullback_along(p, enlarged_central_interval(p, kappa), signs))
    return NotRegular{RegularityFailure::NoExtension, n};
  RegularInterval r;
  r.piece = piece;
  r.order = n;
  r.branch_certificate = std::move(signs);
  return r;
}

namespace {

struct DfsState {
  const ScalarMapParam& p;
  std::size_t cap;
  double kappa;
  std::size_t max_pieces;
  std::atomic<std::size_t>& visited;
};

void bump(DfsState& st) {
  if (st.visited.fetch_add(1) + 1 > st.max_pieces)
    throw ResourceError("regular-interval enumeration exceeded " + std::to_string(st.max_pieces) +
                        " pieces");
}

// Returns true when the piece itself is regular (and recorded).
bool try_record(DfsState& st, const TrackedPiece& t, std::size_t index,
                std::vector<RegularInterval>& out) {
  if (t.order < 1) return false;
  auto r = is_regular(st.p, PuzzlePiece{t.interval(), t.order, index}, st.kappa);
  if (!r) return false;
  out.push_back(r.value());
  return true;
}

void dfs(DfsState& st, const TrackedPiece& t, std::size_t index,
         std::vector<RegularInterval>& out) {
  bump(st);
  if (try_record(st, t, index, out)) return;
  if (t.order >= st.cap) return;
  const auto kids = refine_piece(st.p, t);
  for (std::size_t i = 0; i < kids.size(); ++i) dfs(st, kids[i], i, out);
}

}  // namespace

CoverReport enumerate_regular(const ScalarMapParam& p, std::size_t order_cap, double kappa,
                              const CoverOptions& options) {
  if (order_cap < 1) throw std::invalid_argument("enumerate_regular needs order_cap >= 1");
  CoverReport rep;
  rep.order_cap = order_cap;
  rep.kappa = kappa;
  rep.central_length = central_interval(p).length();
  rep.return_time = critical_return_time(p, kReturnSearchSteps);

  std::atomic<std::size_t> visited{0};
  DfsState st{p, order_cap, kappa, options.max_pieces, visited};

  // Breadth-first over the first few orders, then independent subtrees in parallel.
  std::vector<RegularInterval> found;
  std::vector<std::pair<TrackedPiece, std::size_t>> frontier{{tracked_central_piece(p), 0}};
  const std::size_t want = std::max<std::size_t>(8, 8 * options.workers);
  while (!frontier.empty() && frontier.size() < want && frontier.front().first.order < order_cap) {
    std::vector<std::pair<TrackedPiece, std::size_t>> next;
    for (const auto& [t, idx] : frontier) {
      bump(st);
      if (try_record(st, t, idx, found)) continue;
      const auto kids = refine_piece(p, t);
      for (std::size_t i = 0; i < kids.size(); ++i) next.emplace_back(kids[i], i);
    }
    frontier.swap(next);
  }
  std::vector<std::vector<RegularInterval>> parts(frontier.size());
  parallel_for(frontier.size(), options.workers,
               [&](std::size_t i) { dfs(st, frontier[i].first, frontier[i].second, parts[i]); });
  for (auto& part : parts) found.insert(found.end(), part.begin(), part.end());
  std::sort(found.begin(), found.end(), [](const RegularInterval& u, const RegularInterval& v) {
    return u.interval().lo < v.interval().lo;
  });
  if (rep.return_time)
    for (auto& r : found) r.is_simple = r.order < *rep.return_time;
  rep.regular_intervals = std::move(found);
  rep.pieces_visited = visited.load();

  std::vector<double> by_order(order_cap + 1, 0.0);
  for (const auto& r : rep.regular_intervals) by_order[r.order] += r.interval().length();
  double covered = 0.0;
  rep.uncovered_measure.resize(order_cap);
  for (std::size_t n = 1; n <= order_cap; ++n) {
    covered += by_order[n];
    rep.uncovered_measure[n - 1] = std::clamp(rep.central_length - covered, 0.0, rep.central_length);
  }

  // Least squares on log uncovered over the last half of the orders.
  std::vector<double> xs, ys;
  for (std::size_t n = order_cap / 2 + 1; n <= order_cap; ++n) {
    const double u = rep.uncovered_measure[n - 1];
    if (u > 0.0) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(std::log(u));
    }
  }
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    rep.fitted_rate = -sxy / sxx;
  }
  return rep;
}

std::optional<RegularInterval> regular_interval_containing(const ScalarMapParam& p, double x,
                                                           std::size_t order_cap, double kappa) {
  const auto A = central_interval(p);
  const auto At = enlarged_central_interval(p, kappa);
  std::vector<int> signs;
  signs.reserve(order_cap);
  double y = x;
  for (std::size_t n = 1; n <= order_cap; ++n) {
    if (y == 0.0) return std::nullopt;
    signs.push_back(y > 0.0 ? +1 : -1);
    y = eval_map(p, y);
    if (!A.interior_contains(y)) continue;
    const auto J = pullback_along(p, A, signs);
    if (!J) continue;
    // The forward orbit of x may have drifted; insist the piece really holds x.
    if (!J->contains(x)) continue;
    if (!pullback_along(p, At, signs)) continue;
    RegularInterval r;
    r.piece = PuzzlePiece{*J, n, 0};
    r.order = n;
    r.branch_certificate = signs;
    return r;
  }
  return std::nullopt;
}

SimpleCover simple_intervals(const ScalarMapParam& p, double kappa, const CoverOptions& options) {
  const auto M = critical_return_time(p, kReturnSearchSteps);
  if (!M) throw NoReturnTime("critical orbit does not return to A");
  const auto A = central_interval(p);
  SimpleCover sc;
  sc.return_time = *M;
  if (*M >= 2 + 1) {
    auto rep = enumerate_regular(p, *M - 1, kappa, options);
    sc.intervals = std::move(rep.regular_intervals);
  }
  for (auto& r : sc.intervals) r.is_simple = true;

  // Uncovered components of A.
  std::vector<RealInterval> gaps;
  double cursor = A.lo;
  const double tol = 1e-12;
  for (const auto& r : sc.intervals) {
    if (r.interval().lo - cursor > tol) gaps.emplace_back(cursor, r.interval().lo);
    cursor = std::max(cursor, r.interval().hi);
  }
  if (A.hi - cursor > tol) gaps.emplace_back(cursor, A.hi);
  if (gaps.size() != 1 || !gaps.front().interior_contains(0.0))
    throw GapNotCentral("uncovered part of A has " + std::to_string(gaps.size()) +
                        " components" + (gaps.size() == 1 ? " not containing 0" : ""));
  sc.central_gap = gaps.front();
  return sc;
}

bool is_admissible(const ScalarMapParam& p, double kappa) {
  const auto M = critical_return_time(p, kReturnSearchSteps);
  if (!M) return false;
  const auto A = central_interval(p);
  const auto At = enlarged_central_interval(p, kappa);
  double x = 0.0;
  for (std::size_t k = 1; k < *M; ++k) {
    x = eval_map(p, x);
    if (At.contains(x) && !A.interior_contains(x)) return false;
  }
  return true;
}

double distortion(const ScalarMapParam& p, const RegularInterval& r, std::size_t samples) {
  const auto& iv = r.interval();
  double lo = INFINITY, hi = 0.0;
  for (std::size_t s = 1; s <= samples; ++s) {
    double x = iv.lo + iv.length() * static_cast<double>(s) / static_cast<double>(samples + 1);
    double logd = 0.0;
    for (std::size_t k = 0; k < r.order; ++k) {
      logd += std::log(std::abs(2.0 * x));
      x = eval_map(p, x);
    }
    lo = std::min(lo, logd);
    hi = std::max(hi, logd);
  }
  return std::exp(hi - lo);
}

nlohmann::json to_json(const RegularInterval& r) {
  return nlohmann::json::array({r.interval().lo, r.interval().hi, r.order, r.is_simple});
}

nlohmann::json to_json(const CoverReport& report) {
  nlohmann::json j;
  std::vector<std::size_t> orders(report.order_cap);
  std::iota(orders.begin(), orders.end(), std::size_t{1});
  j["orders"] = orders;
  j["uncovered"] = report.uncovered_measure;
  j["rate"] = report.fitted_rate;
  j["kappa"] = report.kappa;
  j["central_length"] = report.central_length;
  if (report.return_time)
    j["return_time"] = *report.return_time;
  else
    j["return_time"] = nullptr;
  auto arr = nlohmann::json::array();
  for (const auto& r : report.regular_intervals) arr.push_back(to_json(r));
  j["intervals"] = std::move(arr);
  return j;
}

}  // namespace puzzleforge
