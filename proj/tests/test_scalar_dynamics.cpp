#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "puzzleforge/scalar_dynamics.hpp"

using namespace puzzleforge;

TEST_CASE("eval_map basics") {
  CHECK(eval_map(ScalarMapParam(-2), 0.0) == -2.0);
  CHECK(eval_map(ScalarMapParam(-2), 2.0) == 2.0);
  CHECK(eval_map(ScalarMapParam(-1.5), 0.5) == -1.25);
}

TEST_CASE("parameter range is enforced") {
  CHECK_THROWS_AS(ScalarMapParam(0.5), InvalidParameter);
  CHECK_THROWS_AS(ScalarMapParam(-2.0000001), InvalidParameter);
  CHECK_NOTHROW(ScalarMapParam(-2.0));
  CHECK_NOTHROW(ScalarMapParam(0.25));
}

TEST_CASE("fixed points") {
  auto fp = fixed_points(ScalarMapParam(-2));
  CHECK(fp.alpha == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(fp.beta == doctest::Approx(2.0).epsilon(1e-15));
  fp = fixed_points(ScalarMapParam(-1));
  CHECK(fp.alpha == doctest::Approx((1 - std::sqrt(5.0)) / 2).epsilon(1e-15));
  CHECK(fp.beta == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-15));
  fp = fixed_points(ScalarMapParam(0.25));
  CHECK(fp.alpha == 0.5);
  CHECK(fp.beta == 0.5);
}

TEST_CASE("fixed point residuals and ordering over sampled a") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 0.25);
  for (int i = 0; i < 1000; ++i) {
    const ScalarMapParam p(u(rng));
    const auto fp = fixed_points(p);
    CHECK(std::abs(eval_map(p, fp.alpha) - fp.alpha) <= kFixedPointTol);
    CHECK(std::abs(eval_map(p, fp.beta) - fp.beta) <= kFixedPointTol);
    CHECK(fp.alpha <= fp.beta);
    if (p.a() < -0.75) {
      CHECK(-fp.beta < fp.alpha);
      CHECK(fp.alpha < -fp.alpha);
      CHECK(-fp.alpha < fp.beta);
    }
  }
}

TEST_CASE("invariant core") {
  CHECK(invariant_core(ScalarMapParam(-2)) == RealInterval(-2, 2));
  CHECK(invariant_core(ScalarMapParam(-1)) == RealInterval(-1, 0));
  CHECK(invariant_core(ScalarMapParam(-1.5)) == RealInterval(-1.5, 0.75));
  CHECK_THROWS_AS(invariant_core(ScalarMapParam(-0.5)), NotInvariant);
  // Forward invariance on samples.
  for (double a : {-2.0, -1.8, -1.3, -1.0}) {
    const ScalarMapParam p(a);
    const auto I = invariant_core(p);
    for (int i = 0; i <= 1000; ++i) {
      const double x = I.lo + I.length() * i / 1000.0;
      CHECK(I.contains(RealInterval(eval_map(p, x), eval_map(p, x)), 1e-15));
    }
  }
}

TEST_CASE("orbit with derivative") {
  auto o = orbit_with_derivative(ScalarMapParam(-2), -2.0, 3);
  REQUIRE(o.values.size() == 4);
  CHECK(o.values == std::vector<double>{-2, 2, 2, 2});
  REQUIRE(o.log_derivative_partial_sums.size() == 3);
  CHECK(o.log_derivative_partial_sums[0] == doctest::Approx(std::log(4.0)));
  CHECK(o.log_derivative_partial_sums[1] == doctest::Approx(std::log(16.0)));
  CHECK(o.log_derivative_partial_sums[2] == doctest::Approx(std::log(64.0)));
  CHECK(!o.zero_hit);

  o = orbit_with_derivative(ScalarMapParam(-2), 0.0, 2);
  CHECK(o.values == std::vector<double>{0, -2, 2});
  REQUIRE(o.zero_hit);
  CHECK(*o.zero_hit == 0);
}

TEST_CASE("orbit matches a quad precision re-iteration") {
  const auto o = orbit_with_derivative(ScalarMapParam(-1.9), 0.0, 10);
  const auto q = oracle::quad_orbit(-1.9, 0.0, 10);
  for (std::size_t k = 0; k <= 10; ++k) CHECK(std::abs(o.values[k] - q[k]) < 1e-10);
}

TEST_CASE("log-derivative sums agree with the direct product") {
  for (double a : {-1.9, -1.7, -1.99}) {
    const auto o = orbit_with_derivative(ScalarMapParam(a), 0.3, 1000);
    long double prod = 1.0L;
    for (std::size_t k = 0; k < 1000; ++k) {
      prod *= std::abs(2.0L * o.values[k]);
      const double s = o.log_derivative_partial_sums[k];
      const double ref = static_cast<double>(std::log(prod));
      CHECK(std::abs(s - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("critical return time") {
  // Critical point: 0 -> -1 -> 0 -> ... first lands inside (alpha, -alpha) at step 2.
  CHECK(critical_return_time(ScalarMapParam(-1), 100) == std::optional<std::size_t>(2));
  CHECK(critical_return_time(ScalarMapParam(-1), 100, ReturnConvention::CriticalValue) ==
        std::optional<std::size_t>(1));
  CHECK(!critical_return_time(ScalarMapParam(-2), 1000));

  for (double eps : {1e-3, 1e-4, 1e-5, 1e-6, 1e-8}) {
    const double a = -2 + eps;
    const auto q = oracle::quad_orbit(a, 0.0, 200);
    const double al = fixed_points(ScalarMapParam(a)).alpha;
    std::size_t M = 0;
    for (std::size_t k = 1; k < q.size(); ++k)
      if (al < q[k] && q[k] < -al) {
        M = k;
        break;
      }
    const auto got = critical_return_time(ScalarMapParam(a), 1000);
    REQUIRE(got);
    CHECK(*got == M);
    CHECK(std::abs(static_cast<double>(M) - std::log(1 / eps) / std::log(4.0)) < 3.0);
  }
}

TEST_CASE("semi-conjugacy with the doubling map at a = -2") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ScalarMapParam p(-2);
  for (int i = 0; i < 10000; ++i) {
    const double t = u(rng);
    CHECK(std::abs(eval_map(p, 2 * std::cos(2 * M_PI * t)) - 2 * std::cos(2 * M_PI * 2 * t)) <= 1e-12);
  }
}
