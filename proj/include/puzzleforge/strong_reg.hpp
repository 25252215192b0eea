#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "puzzleforge/errors.hpp"
#include "puzzleforge/interval.hpp"
#include "puzzleforge/regular_cover.hpp"
#include "puzzleforge/scalar_dynamics.hpp"

namespace puzzleforge {

inline constexpr double kDefaultTheta = 0.1;
inline constexpr std::size_t kDefaultDepth = 20;
inline constexpr std::size_t kDefaultOrderCap = 60;
inline constexpr double kParamFloor = 1e-14;

struct ItineraryEntry {
  RegularInterval interval;
  std::size_t order = 0;
};

// Itinerary of the critical value a through regular intervals. The first
// entry holds P^M(a) where M is the critical-value return time; entries of
// order below the critical-point return time are the simple ones.
struct Itinerary {
  std::size_t start_time = 0;          // M, critical-value convention
  std::size_t simple_order_limit = 0;  // orders < this are simple
  std::vector<ItineraryEntry> entries;
  std::vector<std::size_t> cumulative_orders;   // time at which the orbit sits in entries[j]
  std::vector<std::size_t> nonsimple_order_sum; // running sum over non-simple entries
  double current_point = 0.0;                   // P^{M + sum n}(a)

  std::size_t total_order() const noexcept;  // sum of n_j, M excluded
  std::size_t current_time() const noexcept { return start_time + total_order(); }
};

// Starts an itinerary at P^M(a) (critical-value M). Empty if the critical
// orbit does not return.
std::optional<Itinerary> start_itinerary(const ScalarMapParam& p);

enum class BlockReason { CentralGap, UncoveredDust, CriticalHit };

struct Blocked {
  BlockReason reason;
  std::string describe() const;
};

Result<Itinerary, Blocked> extend_itinerary(const ScalarMapParam& p, const Itinerary& it,
                                            const CoverReport& cover);

struct DiamondCheck {
  bool pass = true;
  double margin = 0.0;                               // max over j of nonsimple/total
  std::optional<std::size_t> first_failing_entry;    // 0-based
};

DiamondCheck check_diamond(const Itinerary& it, double theta);

enum class Verdict { StronglyRegularCandidate, Excluded, Undetermined };

enum class ExclusionReason {
  None,
  CriticalHit,   // critical orbit lands on 0: no itinerary exists
  Diamond,       // nonsimple share exceeded theta
  DiamondBound,  // next entry has order > cap, which already forces a failure
  Blocked        // landed outside every regular interval of the supplied cover
};

struct ClassificationResult {
  Verdict verdict = Verdict::Undetermined;
  ExclusionReason reason = ExclusionReason::None;
  std::size_t step = 0;           // first failing entry index for Excluded
  std::size_t depth_reached = 0;  // entries built
  double diamond_margin = 0.0;
  std::optional<std::size_t> return_time;  // critical-value convention
};

std::string to_string(Verdict v);
std::string to_string(ExclusionReason r);

ClassificationResult classify_parameter(const ScalarMapParam& p, std::size_t depth = kDefaultDepth,
                                        double theta = kDefaultTheta,
                                        std::size_t order_cap = kDefaultOrderCap,
                                        double kappa = kDefaultKappa);

// Combinatorial symbol of one itinerary entry.
struct ItinerarySymbol {
  std::size_t order = 0;
  std::vector<int> signs;
  friend bool operator==(const ItinerarySymbol&, const ItinerarySymbol&) = default;
};

struct ItineraryPrefix {
  std::optional<std::size_t> start_time;  // empty when the critical orbit never returns
  std::vector<ItinerarySymbol> symbols;
  bool truncated = false;  // orbit left the cover before the requested depth
  friend bool operator==(const ItineraryPrefix&, const ItineraryPrefix&) = default;
};

ItineraryPrefix itinerary_prefix(const ScalarMapParam& p, std::size_t depth,
                                 std::size_t order_cap = kDefaultOrderCap,
                                 double kappa = kDefaultKappa);

struct ParapuzzleParams {
  std::size_t order_cap = kDefaultOrderCap;
  double kappa = kDefaultKappa;
  double eps_param = kParamFloor;
  std::size_t child_levels = 0;  // fill `children` this many depths deeper
  std::size_t workers = 1;
};

struct ParapuzzleWindow {
  RealInterval param_interval;
  ItineraryPrefix shared_prefix;
  bool undetermined = false;  // sliver at the bisection floor
  std::vector<ParapuzzleWindow> children;
};

std::vector<ParapuzzleWindow> parapuzzle_decompose(const RealInterval& window,
                                                   std::size_t prefix_depth,
                                                   const ParapuzzleParams& params = {});

}  // namespace puzzleforge
