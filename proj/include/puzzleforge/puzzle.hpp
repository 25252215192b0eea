#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "puzzleforge/errors.hpp"
#include "puzzleforge/interval.hpp"
#include "puzzleforge/scalar_dynamics.hpp"

namespace puzzleforge {

inline constexpr double kDedupTol = 1e-10;

struct PuzzlePiece {
  RealInterval interval;
  std::size_t order = 0;
  // Left-to-right position among the pieces of its order. Pieces produced by
  // local refinement (regular-cover) do not know their global position and
  // carry an index relative to their parent instead.
  std::size_t index = 0;
};

struct PuzzleLevel {
  std::size_t order = 0;
  std::vector<PuzzlePiece> pieces;
  std::vector<double> cut_points;
};

struct Unrelated : NumericalError {
  using NumericalError::NumericalError;
};

// Sorted solutions of P^n(x) = +-alpha in [-beta, beta], merged at kDedupTol.
std::vector<double> preimage_set(const ScalarMapParam& p, std::size_t n);

PuzzleLevel puzzle_level(const ScalarMapParam& p, std::size_t n);

const PuzzlePiece& parent_piece(const PuzzleLevel& level_n, const PuzzleLevel& level_n_minus_1,
                                const PuzzlePiece& piece);

const PuzzlePiece& image_piece(const ScalarMapParam& p, const PuzzleLevel& level_n,
                               const PuzzleLevel& level_n_minus_1, const PuzzlePiece& piece);

// Levels memoized for one parameter. Not synchronized: confine to one worker.
class PuzzleCache {
 public:
  explicit PuzzleCache(ScalarMapParam p) : p_(p) {}
  const PuzzleLevel& level(std::size_t n);
  const ScalarMapParam& param() const noexcept { return p_; }

 private:
  ScalarMapParam p_;
  std::map<std::size_t, PuzzleLevel> levels_;
};

// Local refinement, used where whole levels would be too large.
//
// A piece endpoint remembers that it reaches the target set after `steps`
// iterates; forward images are then snapped to the exact target so that
// endpoint images do not drift. Free endpoints (the split point 0 and its
// images) are iterated plainly.
struct TrackedPoint {
  double x = 0.0;
  int steps = -1;       // -1: free
  double target = 0.0;  // one of +-alpha, +-beta when steps >= 0
};

struct TrackedPiece {
  TrackedPoint lo, hi;
  std::size_t order = 0;
  RealInterval interval() const { return RealInterval(lo.x, hi.x); }
};

// A = [alpha, -alpha] as a piece of order 0 with both endpoints on target.
TrackedPiece tracked_central_piece(const ScalarMapParam& p);

// Order-(n+1) pieces inside an order-n piece, left to right.
std::vector<TrackedPiece> refine_piece(const ScalarMapParam& p, const TrackedPiece& piece);

}  // namespace puzzleforge
