#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "puzzleforge/errors.hpp"
#include "puzzleforge/interval.hpp"
#include "puzzleforge/scalar_dynamics.hpp"

namespace puzzleforge {

struct DensityHistogram {
  RealInterval support;
  std::size_t bin_count = 0;
  std::vector<double> masses;

  double bin_width() const { return support.length() / static_cast<double>(bin_count); }
  double bin_center(std::size_t i) const {
    return support.lo + (static_cast<double>(i) + 0.5) * bin_width();
  }
  std::size_t bin_of(double x) const;
};

// Empirical measure of one orbit: exactly n points x_0..x_{n-1}.
struct EmpiricalStats {
  double start = 0.0;
  std::size_t n = 0;
  DensityHistogram histogram;
  double lyapunov_partial = 0.0;  // (1/n) sum log|2 x_i|
};

struct OrbitCriticalHit : NumericalError {
  using NumericalError::NumericalError;
};

struct LyapunovEstimate {
  double exponent = 0.0;
  std::size_t n = 0;
  // Set when the floating-point orbit lands exactly on a fixed point and
  // stays there (typical at a = -2, where -2 -> 2 is exact).
  std::optional<std::size_t> absorbed_at;
};

// (1/n) sum_{i<n} log|2 x_i| over the n iterates after burn_in. Throws
// OrbitCriticalHit when an iterate is exactly 0.
LyapunovEstimate lyapunov_1d(const ScalarMapParam& p, double x0, std::size_t n,
                             std::size_t burn_in = 1000);

struct UlamOptions {
  std::uint64_t rng_seed = 0;
  std::size_t burn_in = 1000;
  std::size_t workers = 1;
};

// Orbit histogram over invariant_core(p). `iterates` counts samples per seed.
// A seed whose floating-point orbit freezes on a fixed point restarts from a
// fresh random point; the restart count is returned through `restarts`.
DensityHistogram ulam_density(const ScalarMapParam& p, std::size_t bins, std::size_t iterates,
                              std::size_t seeds, const UlamOptions& options = {},
                              std::size_t* restarts = nullptr);

// Bin masses of the density 1/(pi sqrt(4 - x^2)) on [-2, 2].
DensityHistogram arcsine_reference(std::size_t bins);

double l1_distance(const DensityHistogram& u, const DensityHistogram& v);

// Integral of log|2x| against the histogram (bin centers).
double mean_log_derivative(const DensityHistogram& h);

EmpiricalStats empirical_stats(const ScalarMapParam& p, double x0, std::size_t n,
                               const RealInterval& support, std::size_t bins);

struct ConvergencePoint {
  std::size_t n = 0;
  double distance = 0.0;
};

// L1 distance between the empirical histogram of x_0..x_{n-1} and `reference`
// at each checkpoint n (sorted ascending).
std::vector<ConvergencePoint> empirical_convergence(const ScalarMapParam& p, double x0,
                                                    const std::vector<std::size_t>& checkpoints,
                                                    const DensityHistogram& reference);

// Geometric checkpoints n = first, first*ratio, ... up to last.
std::vector<std::size_t> geometric_checkpoints(std::size_t first, std::size_t last,
                                               double ratio = 2.0);

}  // namespace puzzleforge
