#include "puzzleforge/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "puzzleforge/parallel.hpp"

namespace puzzleforge {

std::size_t DensityHistogram::bin_of(double x) const {
  const double u = (x - support.lo) / support.length() * static_cast<double>(bin_count);
  if (!(u > 0.0)) return 0;
  return std::min(bin_count - 1, static_cast<std::size_t>(u));
}

LyapunovEstimate lyapunov_1d(const ScalarMapParam& p, double x0, std::size_t n,
                             std::size_t burn_in) {
  if (n < 1000) throw std::invalid_argument("lyapunov_1d needs n >= 1000");
  double x = x0;
  for (std::size_t i = 0; i < burn_in; ++i) x = eval_map(p, x);
  LyapunovEstimate est;
  est.n = n;
  // Neumaier summation; plain accumulation drifts by ~n ulp over 1e7 terms.
  double s = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x == 0.0) throw OrbitCriticalHit("orbit hits the critical point at step " + std::to_string(i));
    const double term = std::log(std::abs(2.0 * x));
    const double t = s + term;
    comp += std::abs(s) >= std::abs(term) ? (s - t) + term : (term - t) + s;
    s = t;
    const double y = eval_map(p, x);
    if (y == x && !est.absorbed_at) est.absorbed_at = i;
    x = y;
  }
  est.exponent = (s + comp) / static_cast<double>(n);
  return est;
}

namespace {

std::mt19937_64 seeded(std::uint64_t seed, std::size_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

DensityHistogram ulam_density(const ScalarMapParam& p, std::size_t bins, std::size_t iterates,
                              std::size_t seeds, const UlamOptions& options,
                              std::size_t* restarts) {
  if (bins < 100) throw std::invalid_argument("ulam_density needs bins >= 100");
  if (seeds < 1 || iterates < 1) throw std::invalid_argument("ulam_density needs samples");
  DensityHistogram h;
  h.support = invariant_core(p);
  h.bin_count = bins;
  std::vector<std::vector<std::uint64_t>> counts(seeds);
  std::vector<std::size_t> restart_counts(seeds, 0);
  parallel_for(seeds, options.workers, [&](std::size_t s) {
    auto rng = seeded(options.rng_seed, s);
    std::uniform_real_distribution<double> U(h.support.lo, h.support.hi);
    auto& c = counts[s];
    c.assign(bins, 0);
    auto fresh = [&] {
      double x = U(rng);
      for (std::size_t i = 0; i < options.burn_in; ++i) x = eval_map(p, x);
      return x;
    };
    double x = fresh();
    for (std::size_t i = 0; i < iterates; ++i) {
      ++c[h.bin_of(x)];
      const double y = eval_map(p, x);
      if (y == x) {
        ++restart_counts[s];
        x = fresh();
      } else {
        x = y;
      }
    }
  });
  // Integer counts; the merge is exact whatever the order.
  std::vector<std::uint64_t> total(bins, 0);
  for (const auto& c : counts)
    for (std::size_t i = 0; i < bins; ++i) total[i] += c[i];
  const double N = static_cast<double>(iterates) * static_cast<double>(seeds);
  h.masses.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) h.masses[i] = static_cast<double>(total[i]) / N;
  if (restarts) {
    *restarts = 0;
    for (auto r : restart_counts) *restarts += r;
  }
  return h;
}

DensityHistogram arcsine_reference(std::size_t bins) {
  DensityHistogram h;
  h.support = RealInterval(-2.0, 2.0);
  h.bin_count = bins;
  h.masses.resize(bins);
  auto F = [](double x) {
    return 0.5 + std::asin(std::clamp(x / 2.0, -1.0, 1.0)) / std::numbers::pi;
  };
  for (std::size_t i = 0; i < bins; ++i) {
    const double lo = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(bins);
    const double hi = -2.0 + 4.0 * static_cast<double>(i + 1) / static_cast<double>(bins);
    h.masses[i] = F(hi) - F(lo);
  }
  return h;
}

double l1_distance(const DensityHistogram& u, const DensityHistogram& v) {
  if (u.bin_count != v.bin_count) throw std::invalid_argument("l1_distance: bin counts differ");
  double d = 0.0;
  for (std::size_t i = 0; i < u.bin_count; ++i) d += std::abs(u.masses[i] - v.masses[i]);
  return d;
}

double mean_log_derivative(const DensityHistogram& h) {
  double s = 0.0;
  for (std::size_t i = 0; i < h.bin_count; ++i)
    if (h.masses[i] > 0.0) s += h.masses[i] * std::log(std::abs(2.0 * h.bin_center(i)));
  return s;
}

EmpiricalStats empirical_stats(const ScalarMapParam& p, double x0, std::size_t n,
                               const RealInterval& support, std::size_t bins) {
  EmpiricalStats st;
  st.start = x0;
  st.n = n;
  st.histogram.support = support;
  st.histogram.bin_count = bins;
  std::vector<std::uint64_t> c(bins, 0);
  double x = x0, s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ++c[st.histogram.bin_of(x)];
    s += std::log(std::abs(2.0 * x));
    x = eval_map(p, x);
  }
  st.histogram.masses.resize(bins);
  for (std::size_t i = 0; i < bins; ++i)
    st.histogram.masses[i] = static_cast<double>(c[i]) / static_cast<double>(n);
  st.lyapunov_partial = n ? s / static_cast<double>(n) : 0.0;
  return st;
}

std::vector<ConvergencePoint> empirical_convergence(const ScalarMapParam& p, double x0,
                                                    const std::vector<std::size_t>& checkpoints,
                                                    const DensityHistogram& reference) {
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
    throw std::invalid_argument("empirical_convergence: checkpoints must be sorted");
  std::vector<ConvergencePoint> out;
  std::vector<std::uint64_t> c(reference.bin_count, 0);
  DensityHistogram h = reference;
  double x = x0;
  std::size_t n = 0;
  for (std::size_t target : checkpoints) {
    for (; n < target; ++n) {
      ++c[reference.bin_of(x)];
      x = eval_map(p, x);
    }
    for (std::size_t i = 0; i < c.size(); ++i)
      h.masses[i] = n ? static_cast<double>(c[i]) / static_cast<double>(n) : 0.0;
    out.push_back({n, l1_distance(h, reference)});
  }
  return out;
}

std::vector<std::size_t> geometric_checkpoints(std::size_t first, std::size_t last, double ratio) {
  std::vector<std::size_t> out;
  double v = static_cast<double>(first);
  while (static_cast<std::size_t>(v) <= last) {
    const auto n = static_cast<std::size_t>(v);
    if (out.empty() || n > out.back()) out.push_back(n);
    v *= ratio;
  }
  return out;
}

}  // namespace puzzleforge
