#include <doctest.h>

#include <cmath>
#include <random>

#include "puzzleforge/regular_cover.hpp"

using namespace puzzleforge;

namespace {

// Independent membership test: x is covered at order <= cap when the order-k
// piece containing x (from the cut points) is regular for some k, checked by
// forward endpoint images and a plain pullback of the enlarged A.
bool covered_by_definition(const ScalarMapParam& p, double x, std::size_t cap, double kappa,
                           const std::vector<std::vector<double>>& cuts) {
  const double al = fixed_points(p).alpha, beta = fixed_points(p).beta;
  const double half = -al, grow = kappa * half;
  for (std::size_t k = 1; k <= cap; ++k) {
    const auto& c = cuts[k];
    auto it = std::upper_bound(c.begin(), c.end(), x);
    const double lo = it == c.begin() ? -beta : *std::prev(it);
    const double hi = it == c.end() ? beta : *it;
    double u = lo, v = hi;
    std::vector<int> signs;
    bool ok = true;
    for (std::size_t j = 0; j < k && ok; ++j) {
      if (u < 0 && 0 < v) ok = false;
      signs.push_back(u + v > 0 ? 1 : -1);
      const double fu = u * u + p.a(), fv = v * v + p.a();
      u = std::min(fu, fv);
      v = std::max(fu, fv);
    }
    if (!ok) continue;
    if (std::abs(u - al) > 1e-9 || std::abs(v + al) > 1e-9) continue;
    double el = al - grow, eh = -al + grow;
    for (std::size_t j = k; j-- > 0 && ok;) {
      if (!(el - p.a() > 0)) ok = false;
      else {
        const double rl = std::sqrt(el - p.a()), rh = std::sqrt(eh - p.a());
        if (signs[j] > 0) {
          el = rl;
          eh = rh;
        } else {
          el = -rh;
          eh = -rl;
        }
        if (el < 0 && 0 < eh) ok = false;
      }
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("is_regular examples at a = -2") {
  const ScalarMapParam p(-2);
  const double r3 = std::sqrt(3.0);
  auto r = is_regular(p, PuzzlePiece{RealInterval(1, r3), 1, 3});
  REQUIRE(r);
  CHECK(r->order == 1);
  CHECK(r->branch_certificate == std::vector<int>{1});

  auto bad = is_regular(p, PuzzlePiece{RealInterval(-1, 1), 1, 2});
  REQUIRE(!bad);
  CHECK(bad.error().reason == RegularityFailure::CriticalInterior);

  bad = is_regular(p, PuzzlePiece{RealInterval(-2, -r3), 1, 0});
  REQUIRE(!bad);
  CHECK(bad.error().reason == RegularityFailure::NotOntoA);
}

TEST_CASE("uncovered measure against Monte-Carlo membership") {
  for (double a : {-2.0, -2 + 1e-4, -1.95}) {
    const ScalarMapParam p(a);
    const std::size_t cap = 7;
    const auto rep = enumerate_regular(p, cap);
    std::vector<std::vector<double>> cuts;
    for (std::size_t k = 0; k <= cap; ++k) cuts.push_back(preimage_set(p, k));
    const auto A = central_interval(p);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(A.lo, A.hi);
    const std::size_t N = 1'000'000;
    std::size_t miss = 0;
    for (std::size_t i = 0; i < N; ++i) miss += !covered_by_definition(p, u(rng), cap, kDefaultKappa, cuts);
    const double est = A.length() * static_cast<double>(miss) / N;
    const double sigma = A.length() * std::sqrt(0.25 / N);
    CHECK(std::abs(est - rep.uncovered_measure.back()) <= 5 * sigma);
    // cap = 1 leaves all of A uncovered at a = -2, central gap included.
    if (a == -2.0) CHECK(enumerate_regular(p, 1).uncovered_measure[0] == doctest::Approx(2.0));
  }
}

TEST_CASE("uncovered measure is monotone and bounded by |A|") {
  for (int i = 0; i < 50; ++i) {
    const ScalarMapParam p(-2 + 1e-6 * std::pow(1000.0, i / 49.0));
    const auto rep = enumerate_regular(p, 12);
    const double A = central_interval(p).length();
    REQUIRE(rep.uncovered_measure.size() == 12);
    for (std::size_t n = 0; n < 12; ++n) {
      CHECK(rep.uncovered_measure[n] >= 0.0);
      CHECK(rep.uncovered_measure[n] <= A * (1 + 1e-12));
      if (n) CHECK(rep.uncovered_measure[n] <= rep.uncovered_measure[n - 1] + 1e-15);
    }
  }
}

TEST_CASE("exponential covering near -2") {
  const auto rep = enumerate_regular(ScalarMapParam(-2 + 1e-4), 25);
  CHECK(rep.fitted_rate > 0.0);
  // Maximal intervals: sorted, pairwise disjoint interiors, none inside another.
  const auto& rs = rep.regular_intervals;
  for (std::size_t i = 1; i < rs.size(); ++i) CHECK(rs[i - 1].interval().hi <= rs[i].interval().lo + 1e-15);
}

TEST_CASE("simple intervals at a = -2 + 1e-4") {
  const ScalarMapParam p(-2 + 1e-4);
  const auto sc = simple_intervals(p);
  const std::size_t Mp = sc.return_time, Mv = Mp - 1;
  double union_len = 0;
  for (const auto& r : sc.intervals) {
    CHECK(r.is_simple);
    CHECK(r.order < Mp);
    union_len += r.interval().length();
    CHECK(!(r.interval().interior_contains(sc.central_gap.lo) || r.interval().interior_contains(sc.central_gap.hi)));
    CHECK(!sc.central_gap.interior_contains(r.interval().mid()));
  }
  CHECK(sc.central_gap.interior_contains(0.0));
  CHECK(std::abs(union_len + sc.central_gap.length() - central_interval(p).length()) <= 1e-9);
  const double ratio = sc.central_gap.length() / std::ldexp(1.0, -static_cast<int>(Mv));
  CHECK(ratio <= 8.0);
  CHECK(ratio >= 1.0 / 8.0);
}

TEST_CASE("simple count is 2M-2 exactly on admissible parameters") {
  std::size_t tested = 0;
  for (int i = 0; i < 400 && tested < 20; ++i) {
    const ScalarMapParam p(-2 + 1e-5 * std::pow(100.0, i / 399.0));
    if (!is_admissible(p)) continue;
    const auto sc = simple_intervals(p);
    CHECK(sc.intervals.size() == 2 * (sc.return_time - 1) - 2);
    ++tested;
  }
  CHECK(tested == 20);
}

TEST_CASE("distortion of sampled regular intervals stays bounded") {
  for (double a : {-2 + 1e-6, -2 + 1e-4, -1.99}) {
    const ScalarMapParam p(a);
    const auto rep = enumerate_regular(p, 20);
    std::size_t step = std::max<std::size_t>(1, rep.regular_intervals.size() / 200);
    for (std::size_t i = 0; i < rep.regular_intervals.size(); i += step)
      CHECK(distortion(p, rep.regular_intervals[i]) <= 100.0);
  }
}

TEST_CASE("point queries agree with the enumeration") {
  const ScalarMapParam p(-2 + 1e-5);
  const auto rep = enumerate_regular(p, 20);
  std::mt19937_64 rng(3);
  const auto A = central_interval(p);
  std::uniform_real_distribution<double> u(A.lo, A.hi);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng);
    const auto q = regular_interval_containing(p, x, 20);
    auto it = std::upper_bound(rep.regular_intervals.begin(), rep.regular_intervals.end(), x,
                               [](double v, const RegularInterval& r) { return v < r.interval().lo; });
    const bool in_enum = it != rep.regular_intervals.begin() && std::prev(it)->interval().contains(x);
    CHECK(in_enum == q.has_value());
    if (q && in_enum) {
      CHECK(std::abs(q->interval().lo - std::prev(it)->interval().lo) <= 1e-12);
      CHECK(q->order == std::prev(it)->order);
    }
  }
}

TEST_CASE("cover report JSON schema") {
  const auto j = to_json(enumerate_regular(ScalarMapParam(-2 + 1e-4), 6));
  for (const char* key : {"orders", "uncovered", "rate", "intervals"}) CHECK(j.contains(key));
  REQUIRE(!j["intervals"].empty());
  CHECK(j["intervals"][0].size() == 4);
}
