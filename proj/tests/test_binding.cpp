#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "puzzleforge/binding.hpp"

using namespace puzzleforge;

TEST_CASE("binding time cases") {
  const ScalarMapParam p(-2 + 1e-4);
  const auto c = critical_value_orbit(p, 400);
  // First time outside the critical window: case (a).
  std::size_t far = 0;
  while (std::abs(c[far]) < 0.1) ++far;
  auto r = binding_time(p, far, 0.05, 100);
  REQUIRE(r);
  CHECK(r->k == 0);
  CHECK(r->c == ReturnCase::A);

  // Shallow return: compare the two orbits step by step.
  std::size_t N = 1;
  while (!(std::abs(c[N]) < 0.1 && std::abs(c[N]) > std::exp(-0.05 * N))) ++N;
  r = binding_time(p, N, 0.05, 100);
  REQUIRE(r);
  CHECK(r->c == ReturnCase::B);
  const auto ret = oracle::quad_orbit(p.a(), c[N], 101);
  const auto crit = oracle::quad_orbit(p.a(), 0.0, 101);
  std::size_t k = 0;
  while (k < 100 && std::abs(ret[k + 1] - crit[k + 1]) <= 0.05) ++k;
  CHECK(r->k == k);
}

TEST_CASE("deep returns are case (c) and long bindings overflow") {
  // P(a) = a^2 + a is about 1e-12 here.
  const ScalarMapParam p(-1 + 1e-12);
  const auto r = binding_time(p, 1, 0.05, 100, 0.1, 0.05);
  if (r) {
    CHECK(r->c == ReturnCase::C);
  } else {
    CHECK(r.error().max_k == 100);
  }
  const ScalarMapParam q(-2 + 1e-4);
  const auto c = critical_value_orbit(q, 200);
  std::size_t N = 1;
  while (!(std::abs(c[N]) < 0.1 && std::abs(c[N + 1] - c[0]) <= 0.05)) ++N;
  const auto o = binding_time(q, N, 0.05, 1);
  REQUIRE(!o);
  CHECK(o.error().N == N);
}

TEST_CASE("condition H") {
  BindingLedger empty;
  empty.horizon = 100;
  CHECK(check_H(empty, 100, 0.0));
  BindingLedger one;
  one.horizon = 100;
  one.returns.push_back({10, 0.01, 50, ReturnCase::B, false});
  CHECK(!check_H(one, 100, 0.1));
  bool prev = false;
  for (double af = 0.0; af <= 1.0; af += 0.01) {
    const bool pass = check_H(one, 100, af);
    if (prev) CHECK(pass);
    prev = pass;
  }
}

TEST_CASE("Collet-Eckmann estimates") {
  for (std::size_t n : {1u, 10u, 100u, 1000u}) {
    const auto e = collet_eckmann_estimate(ScalarMapParam(-2), n);
    REQUIRE(e);
    CHECK(std::abs(e->rate - std::log(4.0)) <= 1e-12);
  }
  const auto hit = collet_eckmann_estimate(ScalarMapParam(-1), 50);
  REQUIRE(!hit);
  CHECK(hit.error().index == 1);
}

TEST_CASE("expansion outside the critical window") {
  const ScalarMapParam p(-2);
  const auto e = expansion_outside(p, 0.1);
  CHECK(!e.degenerate);
  CHECK(e.lambda > 1.0);
  MESSAGE("lambda estimate at delta=0.1: " << e.lambda);
  CHECK(expansion_outside(p, 1.0).degenerate);
  double prev = INFINITY;
  for (double d : {0.5, 0.3, 0.2, 0.1, 0.05, 0.01}) {
    const double l = expansion_outside(p, d).lambda;
    CHECK(l <= prev);
    prev = l;
  }
}

TEST_CASE("ledger invariants") {
  const BindingKnobs k;
  for (double a : {-2 + 1e-4, -2 + 3e-5, -1.99}) {
    const auto L = build_ledger(ScalarMapParam(a), 300, k);
    std::size_t end = 0;
    for (std::size_t i = 0; i < L.returns.size(); ++i) {
      if (i) CHECK(L.returns[i].N > end);  // binding periods are disjoint
      end = L.returns[i].N + L.returns[i].k;
    }
    std::size_t prev = 0;
    for (std::size_t N = 0; N <= 300; ++N) {
      const auto b = L.total_bound_time_before(N);
      CHECK(b >= prev);
      prev = b;
    }
  }
}

TEST_CASE("selection on [-2+1e-6, -2+1e-4]") {
  const RealInterval w(-2 + 1e-6, -2 + 1e-4);
  const BindingKnobs k;
  const auto rep = run_selection(w, 200, k, 4);
  CHECK(rep.surviving_measure() > 0.0);
  CHECK(rep.surviving_measure() < w.length());
  REQUIRE(rep.survivors.size() >= 2);
  // Nowhere dense at sampling resolution: survivors are separated by excluded gaps.
  std::size_t gaps = 0;
  for (std::size_t i = 1; i < rep.survivors.size(); ++i)
    gaps += rep.survivors[i].param_interval.lo > rep.survivors[i - 1].param_interval.hi;
  CHECK(gaps >= 1);
  for (const auto& s : rep.survivors) {
    const ScalarMapParam p(s.center);
    const auto L = build_ledger(p, 200, rep.knobs);
    CHECK(L == *s.ledger);  // replay is bit-for-bit
    for (std::size_t N = 1; N <= 200; ++N) CHECK(check_H(L, N, k.alpha_frac));
    const auto ce = collet_eckmann_estimate(p, 200);
    REQUIRE(ce);
    CHECK(ce->tail_min > 0.0);
    // P2 up to p2_through: schedules at both ends and the midpoint agree.
    const auto lo = build_ledger(ScalarMapParam(s.param_interval.lo), s.p2_through, rep.knobs);
    const auto hi = build_ledger(ScalarMapParam(s.param_interval.hi), s.p2_through, rep.knobs);
    const auto mid = build_ledger(p, s.p2_through, rep.knobs);
    auto times = [](const BindingLedger& l) {
      std::vector<std::pair<std::size_t, std::size_t>> v;
      for (const auto& r : l.returns) v.emplace_back(r.N, r.k);
      return v;
    };
    CHECK(times(lo) == times(mid));
    CHECK(times(hi) == times(mid));
  }
  // Worker count does not change the report.
  const auto one = run_selection(w, 200, k, 1);
  CHECK(to_json(one).dump() == to_json(rep).dump());
}

TEST_CASE("exclusion monotonicity in alpha_frac and alpha_BA") {
  const RealInterval w(-2 + 1e-6, -2 + 1e-4);
  auto covered = [](const SelectionReport& big, const SelectionReport& small) {
    for (const auto& s : small.survivors) {
      bool inside = false;
      for (const auto& b : big.survivors) inside |= b.param_interval.contains(s.param_interval);
      if (!inside) return false;
    }
    return true;
  };
  BindingKnobs base;
  const auto ref = run_selection(w, 200, base, 4);
  for (double af : {0.0, 0.02, 0.05}) {
    BindingKnobs k = base;
    k.alpha_frac = af;
    const auto r = run_selection(w, 200, k, 4);
    CHECK(covered(ref, r));
    CHECK(r.surviving_measure() <= ref.surviving_measure());
  }
  // |c_N| < exp(-alpha_BA N) is the deep case: a smaller alpha_BA excludes more.
  for (double ab : {0.03, 0.01, 0.0}) {
    BindingKnobs k = base;
    k.alpha_BA = ab;
    const auto r = run_selection(w, 200, k, 4);
    CHECK(covered(ref, r));
  }
}

TEST_CASE("selection JSON") {
  const auto j = to_json(run_selection(RealInterval(-2 + 1e-6, -2 + 1e-5), 100));
  for (const char* key : {"knobs", "survivor_measure_by_N", "exclusions", "windows", "p2_check"}) CHECK(j.contains(key));
}
