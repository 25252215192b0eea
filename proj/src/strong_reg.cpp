#include "puzzleforge/strong_reg.hpp"

#include <algorithm>
#include <functional>

#include "puzzleforge/parallel.hpp"

namespace puzzleforge {

std::size_t Itinerary::total_order() const noexcept {
  std::size_t s = 0;
  for (const auto& e : entries) s += e.order;
  return s;
}

std::string Blocked::describe() const {
  switch (reason) {
    case BlockReason::CentralGap:
      return "central_gap";
    case BlockReason::UncoveredDust:
      return "uncovered";
    case BlockReason::CriticalHit:
      return "critical_hit";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::StronglyRegularCandidate:
      return "candidate";
    case Verdict::Excluded:
      return "excluded";
    case Verdict::Undetermined:
      return "undetermined";
  }
  return "unknown";
}

std::string to_string(ExclusionReason r) {
  switch (r) {
    case ExclusionReason::None:
      return "none";
    case ExclusionReason::CriticalHit:
      return "critical_hit";
    case ExclusionReason::Diamond:
      return "diamond";
    case ExclusionReason::DiamondBound:
      return "diamond_bound";
    case ExclusionReason::Blocked:
      return "blocked";
  }
  return "unknown";
}

std::optional<Itinerary> start_itinerary(const ScalarMapParam& p) {
  const auto M = critical_return_time(p, kReturnSearchSteps, ReturnConvention::CriticalValue);
  if (!M) return std::nullopt;
  Itinerary it;
  it.start_time = *M;
  it.simple_order_limit = *M + 1;
  double x = p.a();
  for (std::size_t i = 0; i < *M; ++i) x = eval_map(p, x);
  it.current_point = x;
  return it;
}

namespace {

void append(const ScalarMapParam& p, Itinerary& it, RegularInterval r) {
  const std::size_t n = r.order;
  r.is_simple = n < it.simple_order_limit;
  it.cumulative_orders.push_back(it.current_time());
  const std::size_t prev = it.nonsimple_order_sum.empty() ? 0 : it.nonsimple_order_sum.back();
  it.nonsimple_order_sum.push_back(prev + (r.is_simple ? 0 : n));
  it.entries.push_back({std::move(r), n});
  double x = it.current_point;
  for (std::size_t i = 0; i < n; ++i) x = eval_map(p, x);
  it.current_point = x;
}

bool orbit_hits_zero(const ScalarMapParam& p, double x, std::size_t steps) {
  for (std::size_t i = 0; i <= steps; ++i) {
    if (x == 0.0) return true;
    x = eval_map(p, x);
  }
  return false;
}

}  // namespace

Result<Itinerary, Blocked> extend_itinerary(const ScalarMapParam& p, const Itinerary& it,
                                            const CoverReport& cover) {
  const double x = it.current_point;
  if (x == 0.0) return Blocked{BlockReason::CriticalHit};
  const auto& rs = cover.regular_intervals;
  auto pos = std::upper_bound(rs.begin(), rs.end(), x, [](double v, const RegularInterval& r) {
    return v < r.interval().lo;
  });
  if (pos != rs.begin() && std::prev(pos)->interval().contains(x)) {
    Itinerary out = it;
    append(p, out, *std::prev(pos));
    return out;
  }
  // The uncovered component holding x, bounded by the neighbouring intervals.
  const double left = pos == rs.begin() ? -INFINITY : std::prev(pos)->interval().hi;
  const double right = pos == rs.end() ? INFINITY : pos->interval().lo;
  if (left < 0.0 && 0.0 < right) return Blocked{BlockReason::CentralGap};
  return Blocked{BlockReason::UncoveredDust};
}

DiamondCheck check_diamond(const Itinerary& it, double theta) {
  DiamondCheck dc;
  std::size_t total = 0;
  for (std::size_t j = 0; j < it.entries.size(); ++j) {
    total += it.entries[j].order;
    const std::size_t ns = it.nonsimple_order_sum[j];
    const double ratio = total ? static_cast<double>(ns) / static_cast<double>(total) : 0.0;
    dc.margin = std::max(dc.margin, ratio);
    if (static_cast<double>(ns) > theta * static_cast<double>(total) && dc.pass) {
      dc.pass = false;
      dc.first_failing_entry = j;
    }
  }
  return dc;
}

ClassificationResult classify_parameter(const ScalarMapParam& p, std::size_t depth, double theta,
                                        std::size_t order_cap, double kappa) {
  ClassificationResult res;
  auto start = start_itinerary(p);
  if (!start) return res;  // no return (e.g. a = -2): not applicable
  res.return_time = start->start_time;
  if (depth == 0) return res;
  Itinerary it = std::move(*start);
  std::size_t total = 0;
  for (std::size_t j = 0; j < depth; ++j) {
    const double x = it.current_point;
    auto r = regular_interval_containing(p, x, order_cap, kappa);
    if (!r) {
      res.depth_reached = j;
      if (orbit_hits_zero(p, x, order_cap)) {
        res.verdict = Verdict::Excluded;
        res.reason = ExclusionReason::CriticalHit;
        res.step = j;
        return res;
      }
      // Any regular interval still to come has order > order_cap and is
      // non-simple; if even the smallest such order breaks the bound, exclude.
      const std::size_t ns = it.nonsimple_order_sum.empty() ? 0 : it.nonsimple_order_sum.back();
      const double n_next = static_cast<double>(order_cap + 1);
      if (order_cap + 1 >= it.simple_order_limit &&
          (static_cast<double>(ns) + n_next) > theta * (static_cast<double>(total) + n_next)) {
        res.verdict = Verdict::Excluded;
        res.reason = ExclusionReason::DiamondBound;
        res.step = j;
        res.diamond_margin =
            std::max(res.diamond_margin, (ns + n_next) / (static_cast<double>(total) + n_next));
        return res;
      }
      res.verdict = Verdict::Undetermined;
      return res;
    }
    append(p, it, std::move(*r));
    total += it.entries.back().order;
    const std::size_t ns = it.nonsimple_order_sum.back();
    res.diamond_margin =
        std::max(res.diamond_margin, static_cast<double>(ns) / static_cast<double>(total));
    res.depth_reached = j + 1;
    if (static_cast<double>(ns) > theta * static_cast<double>(total)) {
      res.verdict = Verdict::Excluded;
      res.reason = ExclusionReason::Diamond;
      res.step = j;
      return res;
    }
  }
  res.verdict = Verdict::StronglyRegularCandidate;
  return res;
}

ItineraryPrefix itinerary_prefix(const ScalarMapParam& p, std::size_t depth, std::size_t order_cap,
                                 double kappa) {
  ItineraryPrefix out;
  if (depth == 0) return out;
  auto start = start_itinerary(p);
  if (!start) return out;
  out.start_time = start->start_time;
  Itinerary it = std::move(*start);
  for (std::size_t j = 0; j < depth; ++j) {
    auto r = regular_interval_containing(p, it.current_point, order_cap, kappa);
    if (!r) {
      out.truncated = true;
      break;
    }
    out.symbols.push_back({r->order, r->branch_certificate});
    append(p, it, std::move(*r));
  }
  return out;
}

namespace {

struct Leaf {
  RealInterval iv;
  ItineraryPrefix prefix;
  bool sliver;
};

// Levels of unconditional bisection before subtrees are handed to workers.
// Fixed, so the dyadic tree (and hence the output) does not depend on the
// worker count.
constexpr int kForcedLevels = 4;

}  // namespace

std::vector<ParapuzzleWindow> parapuzzle_decompose(const RealInterval& window,
                                                   std::size_t prefix_depth,
                                                   const ParapuzzleParams& params) {
  auto pref = [&](double a) {
    return itinerary_prefix(ScalarMapParam(a), prefix_depth, params.order_cap, params.kappa);
  };
  std::vector<ParapuzzleWindow> out;
  if (prefix_depth == 0) {
    out.push_back({window, {}, false, {}});
    return out;
  }

  std::function<void(double, double, const ItineraryPrefix&, const ItineraryPrefix&,
                      std::vector<Leaf>&)>
      bisect = [&](double lo, double hi, const ItineraryPrefix& plo, const ItineraryPrefix& phi,
                   std::vector<Leaf>& leaves) {
        const double mid = 0.5 * (lo + hi);
        auto pm = pref(mid);
        if (plo == pm && pm == phi) {
          leaves.push_back({RealInterval(lo, hi), pm, false});
          return;
        }
        if (hi - lo <= params.eps_param || mid <= lo || mid >= hi) {
          leaves.push_back({RealInterval(lo, hi), pm, true});
          return;
        }
        bisect(lo, mid, plo, pm, leaves);
        bisect(mid, hi, pm, phi, leaves);
      };

  // Edges of the first kForcedLevels of halving, the same midpoints bisection uses.
  std::vector<double> edges{window.lo, window.hi};
  for (int lvl = 0; lvl < kForcedLevels; ++lvl) {
    std::vector<double> finer{edges.front()};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      finer.push_back(0.5 * (edges[i] + edges[i + 1]));
      finer.push_back(edges[i + 1]);
    }
    edges.swap(finer);
  }
  const std::size_t chunks = edges.size() - 1;
  std::vector<ItineraryPrefix> edge_prefix(chunks + 1);
  parallel_for(chunks + 1, params.workers, [&](std::size_t i) { edge_prefix[i] = pref(edges[i]); });
  std::vector<std::vector<Leaf>> parts(chunks);
  parallel_for(chunks, params.workers, [&](std::size_t i) {
    bisect(edges[i], edges[i + 1], edge_prefix[i], edge_prefix[i + 1], parts[i]);
  });

  // Merge neighbours with identical prefixes so windows are maximal.
  std::vector<Leaf> merged;
  for (auto& part : parts)
    for (auto& lf : part) {
      if (!merged.empty() && !merged.back().sliver && !lf.sliver &&
          merged.back().prefix == lf.prefix) {
        merged.back().iv.hi = lf.iv.hi;
      } else {
        merged.push_back(std::move(lf));
      }
    }
  for (auto& lf : merged) {
    ParapuzzleWindow w{lf.iv, std::move(lf.prefix), lf.sliver, {}};
    if (params.child_levels > 0 && !w.undetermined) {
      ParapuzzleParams sub = params;
      sub.child_levels -= 1;
      w.children = parapuzzle_decompose(w.param_interval, prefix_depth + 1, sub);
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace puzzleforge
