#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "puzzleforge/henon.hpp"
#include "puzzleforge/measures.hpp"

using namespace puzzleforge;

TEST_CASE("one step of the map") {
  const PlaneParams p{-1.4, -0.3, {}};
  const Vec2 w = henon_step(p, 0.5, 0.25);
  CHECK(w.x == doctest::Approx(0.25 - 1.4 + 0.25));
  CHECK(w.y == doctest::Approx(0.15));
  const PlaneParams flat{-2.0, 0.0, {}};
  const Vec2 v = henon_step(flat, 1.0, 0.0);
  CHECK(v.x == -1.0);
  CHECK(v.y == 0.0);
}

TEST_CASE("jacobian against central differences") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ua(-2.0, -1.0), ub(-0.5, 0.5), uz(-1.5, 1.5);
  for (int k = 0; k < 1000; ++k) {
    PlaneParams p{ua(rng), ub(rng), {}};
    if (k % 2) p.perturbation = bump_perturbation(0.01, {0.2, -0.1}, 0.5);
    const double x = uz(rng), y = uz(rng), h = 1e-6;
    const auto J = jacobian(p, x, y);
    if (!p.perturbation) CHECK(std::abs(J.det - p.b) <= 1e-12);
    const Vec2 fx = henon_step(p, x + h, y), bx = henon_step(p, x - h, y);
    const Vec2 fy = henon_step(p, x, y + h), by = henon_step(p, x, y - h);
    CHECK(std::abs((fx.x - bx.x) / (2 * h) - J.d.a11) <= 1e-6);
    CHECK(std::abs((fx.y - bx.y) / (2 * h) - J.d.a21) <= 1e-6);
    CHECK(std::abs((fy.x - by.x) / (2 * h) - J.d.a12) <= 1e-6);
    CHECK(std::abs((fy.y - by.y) / (2 * h) - J.d.a22) <= 1e-6);
    CHECK(std::abs(J.det - J.d.det()) <= 1e-14);
  }
}

TEST_CASE("fixed points of the classical map") {
  const auto fp = fixed_points_plane({-1.4, -0.3, {}});
  for (const auto* q : {&fp.alpha, &fp.beta}) {
    const Vec2 w = henon_step({-1.4, -0.3, {}}, q->z.x, q->z.y);
    CHECK(std::abs(w.x - q->z.x) <= 1e-14);
    CHECK(std::abs(w.y - q->z.y) <= 1e-14);
    CHECK(q->saddle);
    CHECK(q->lambda_unstable * q->lambda_stable == doctest::Approx(-0.3));
  }
  CHECK(fp.beta.is_beta);
  CHECK(!fp.alpha.is_beta);
  CHECK(fp.beta.z.x > fp.alpha.z.x);
  PlaneParams bumped{-1.4, -0.3, bump_perturbation(0.01, {0, 0}, 1)};
  CHECK_THROWS_AS(fixed_points_plane(bumped), std::invalid_argument);
  CHECK_THROWS_AS(fixed_points_plane({1.0, -0.3, {}}), NoFixedPoints);
}

TEST_CASE("fixed points against a generic eigen-solve") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ua(-2.0, -0.5), ub(-0.9, 0.9);
  for (int k = 0; k < 1000; ++k) {
    const PlaneParams p{ua(rng), ub(rng), {}};
    // x^2 - (1 + b) x + a = 0 via its companion matrix.
    Eigen::Matrix2d C;
    C << 0, -p.a, 1, 1 + p.b;
    const Eigen::Vector2cd roots = C.eigenvalues();
    REQUIRE(std::abs(roots(0).imag()) < 1e-12);
    const double r0 = roots(0).real(), r1 = roots(1).real();
    bool complex_pair = false;
    for (double r : {r0, r1}) {
      Eigen::Matrix2d A;
      A << 2 * r, 1, -p.b, 0;
      complex_pair |= std::abs(A.eigenvalues()(0).imag()) > 0.0;
    }
    if (complex_pair) {
      CHECK_THROWS_AS(fixed_points_plane(p), NoFixedPoints);
      continue;
    }
    const auto fp = fixed_points_plane(p);
    CHECK(fp.beta.z.x == doctest::Approx(std::max(r0, r1)).epsilon(1e-10));
    CHECK(fp.alpha.z.x == doctest::Approx(std::min(r0, r1)).epsilon(1e-10));
    for (const auto* q : {&fp.alpha, &fp.beta}) {
      CHECK(q->z.y == doctest::Approx(-p.b * q->z.x).epsilon(1e-12));
      const auto J = jacobian(p, q->z.x, q->z.y).d;
      Eigen::Matrix2d A;
      A << J.a11, J.a12, J.a21, J.a22;
      Eigen::EigenSolver<Eigen::Matrix2d> es(A);
      const auto ev = es.eigenvalues();
      int iu = std::abs(ev(0).real()) >= std::abs(ev(1).real()) ? 0 : 1;
      const double lu = ev(iu).real(), ls = ev(1 - iu).real();
      CHECK(q->lambda_unstable == doctest::Approx(lu).epsilon(1e-9));
      CHECK(q->lambda_stable == doctest::Approx(ls).epsilon(1e-9));
      CHECK(q->saddle == (std::abs(lu) > 1 && std::abs(ls) < 1));
      if (q->saddle) CHECK(q->is_beta == (lu > 0));
      // Eigenvector direction, up to sign.
      const Vec2 Jv = J * q->v_unstable;
      CHECK(std::abs(Jv.x - lu * q->v_unstable.x) <= 1e-9 * std::abs(lu));
      CHECK(std::abs(Jv.y - lu * q->v_unstable.y) <= 1e-9 * std::abs(lu));
    }
  }
}

TEST_CASE("trapping region") {
  const PlaneParams p{-1.4, -0.3, {}};
  const auto quad = henon_classical_quadrilateral();
  REQUIRE(quad.size() == 4);
  const auto rep = trapping_check(p, quad, 513);
  MESSAGE("margin " << rep.margin);
  CHECK(rep.pass);
  CHECK(rep.max_penetration == 0.0);
  const auto disk = trapping_check(p, disk_polygon({0, 0}, 0.5), 129);
  CHECK(!disk.pass);
  CHECK(disk.max_penetration > 0.0);
  // Grids 2^k + 1 are nested, so the sampled margin can only shrink.
  double prev = INFINITY;
  for (std::size_t g : {17u, 33u, 65u, 129u, 257u, 513u}) {
    const double m = trapping_check(p, quad, g).margin;
    CHECK(m <= prev);
    prev = m;
  }
}

TEST_CASE("polygon geometry") {
  const auto sq = Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(point_in_polygon(sq, {0.5, 0.5}));
  CHECK(!point_in_polygon(sq, {1.5, 0.5}));
  CHECK(signed_distance(sq, {0.5, 0.25}) == doctest::Approx(0.25));
  CHECK(signed_distance(sq, {1.5, 0.5}) == doctest::Approx(-0.5));
}

TEST_CASE("plane Lyapunov exponents") {
  const PlaneParams p{-1.4, -0.3, {}};
  const auto L = lyapunov_plane(p, 0.1, 0.0, 1'000'000);
  MESSAGE("lambda1 " << L.lambda1 << " lambda2 " << L.lambda2 << " KY " << L.kaplan_yorke());
  CHECK(std::abs(L.lambda1 + L.lambda2 - std::log(0.3)) <= 1e-6);
  CHECK(std::abs(L.mean_log_det - std::log(0.3)) <= 1e-12);
  CHECK(L.lambda1 > 0.0);
  CHECK(L.kaplan_yorke() >= 1.24);
  CHECK(L.kaplan_yorke() <= 1.28);
  CHECK_THROWS_AS(lyapunov_plane(p, 10.0, 0.0, 1000), Escaped);
}

TEST_CASE("b = 0 reduces to the scalar exponent") {
  for (double a : {-1.9, -1.75, -1.5}) {
    const auto L = lyapunov_plane({a, 0.0, {}}, 0.1, 0.0, 100'000);
    const auto e = lyapunov_1d(ScalarMapParam(a), 0.1, 100'000);
    CHECK(std::abs(L.lambda1 - e.exponent) <= 1e-6);
    CHECK(std::isinf(L.lambda2));
  }
}

TEST_CASE("attractor sample") {
  const PlaneParams p{-1.4, -0.3, {}};
  const auto s = attractor_sample(p, 1'000'000);
  REQUIRE(s.points.size() == 1'000'000);
  CHECK(!s.unstable_sweep.empty());
  const auto quad = henon_classical_quadrilateral();
  std::size_t outside = 0;
  for (const auto& z : s.points) outside += !point_in_polygon(quad, z);
  CHECK(outside == 0);
  const auto bc = box_counting_dimension(s.points);
  MESSAGE("box-counting slope " << bc.slope);
  CHECK(bc.slope >= 1.15);
  CHECK(bc.slope <= 1.35);
  for (std::size_t i = 1; i < bc.counts.size(); ++i) CHECK(bc.counts[i] >= bc.counts[i - 1]);

  const auto flat = attractor_sample({-1.9, 0.0, {}}, 100'000);
  const auto core = invariant_core(ScalarMapParam(-1.9));
  for (const auto& z : flat.points) {
    CHECK(z.y == 0.0);
    CHECK(core.contains(z.x));
  }
}

TEST_CASE("box counting on known sets") {
  std::vector<Vec2> line, square;
  for (int i = 0; i < 100000; ++i) line.push_back({i / 1e5, 0.5 * i / 1e5});
  for (int i = 0; i < 1000; ++i)
    for (int j = 0; j < 1000; ++j) square.push_back({i / 1e3, j / 1e3});
  CHECK(box_counting_dimension(line).slope == doctest::Approx(1.0).epsilon(0.02));
  CHECK(box_counting_dimension(square).slope == doctest::Approx(2.0).epsilon(0.02));
}
