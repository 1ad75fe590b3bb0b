#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opentri/model_surface.hpp"
#include "opentri/numerics.hpp"
#include "oracles.hpp"

using namespace opentri;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("clairaut constant") {
  const auto euclid = WarpingFunction::euclidean();
  const auto hyp = WarpingFunction::hyperbolic();
  CHECK(clairaut_constant(5.0, 0.0, euclid) == doctest::Approx(0.0));
  CHECK(clairaut_constant(0.0, kPi / 2, hyp) == doctest::Approx(1.0));
  CHECK(clairaut_constant(1.0, kPi / 6, hyp) ==
        doctest::Approx(std::cosh(1.0) / 2).epsilon(1e-12));
}

TEST_CASE("flat geodesics are straight lines") {
  const auto w = WarpingFunction::euclidean();
  auto g = integrate_geodesic({1.0, 0.0}, kPi / 4, std::sqrt(2.0), w);
  CHECK(g.end().x == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(g.end().y == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(g.status == GeodesicStatus::Completed);
}

TEST_CASE("boundary rays have constant y") {
  const auto w = WarpingFunction::gauss();
  auto g = integrate_geodesic({0.0, 0.4}, 0.0, 3.0, w);
  CHECK(g.end().x == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(g.end().y == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(g.clairaut == 0.0);
  for (const auto& smp : g.path) CHECK(std::abs(smp.y - 0.4) < 1e-12);
}

TEST_CASE("boundary hit terminates with status") {
  const auto w = WarpingFunction::hyperbolic();
  auto g = integrate_geodesic({0.5, 0.0}, kPi * 0.9, 5.0, w);
  CHECK(g.status == GeodesicStatus::HitBoundary);
  CHECK(g.end().x == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(g.total_length < 5.0);
}

TEST_CASE("window exit throws") {
  const auto w = WarpingFunction::euclidean(5.0);
  CHECK_THROWS_AS(integrate_geodesic({4.0, 0.0}, 0.0, 2.0, w),
                  std::domain_error);
}

TEST_CASE("hyperbolic endpoint distance matches the launch length") {
  const auto w = WarpingFunction::hyperbolic();
  auto g = integrate_geodesic({1.0, 0.0}, kPi / 3, 2.0, w);
  const auto e = g.end();
  CHECK(oracles::fermi_distance(1.0, e.x, std::abs(e.y)) ==
        doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("clairaut and unit-speed drift on random geodesics") {
  SampleRng rng(11, 0);
  for (const auto& w : {WarpingFunction::euclidean(), WarpingFunction::hyperbolic(),
                        WarpingFunction::gauss()}) {
    for (int i = 0; i < 20; ++i) {
      const double x0 = rng.uniform(0.1, 2.2);
      const double ang = rng.uniform(0.05, kPi - 0.05);
      auto g = integrate_geodesic({x0, 0.0}, ang, 6.0, w);
      double drift = 0.0, speed = 0.0;
      for (const auto& smp : g.path) {
        const double m = w.evaluate_extended(smp.x).m;
        drift = std::max(drift, std::abs(m * m * std::abs(smp.yp) - g.clairaut));
        speed = std::max(
            speed, std::abs(smp.xp * smp.xp + m * m * smp.yp * smp.yp - 1.0));
      }
      CHECK(drift < 1e-8);
      CHECK(speed < 1e-8);
    }
  }
}

TEST_CASE("turning points sit on the level m = nu") {
  const auto w = WarpingFunction::gauss();
  auto g = integrate_geodesic({0.5, 0.0}, kPi / 4, 4.0, w);
  const auto turns = g.turning_points();
  REQUIRE(!turns.empty());
  for (double s : turns) {
    const double x = g.point_at(s).x;
    CHECK(std::abs(w.evaluate(x).m - g.clairaut) < 1e-6);
  }
}

TEST_CASE("length between parallels") {
  const auto euclid = WarpingFunction::euclidean();
  CHECK(length_between_parallels(0.0, 0.0, 3.0, euclid) ==
        doctest::Approx(3.0).epsilon(1e-10));
  CHECK(length_between_parallels(0.5, 1.0, 2.0, euclid) ==
        doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-9));

  const auto hyp = WarpingFunction::hyperbolic();
  // Compare the quadrature route against a dense geodesic leg with the same
  // Clairaut constant.
  const double nu = 1.0;
  const double x1 = 0.5, x2 = 1.5;
  const double ang = std::asin(nu / std::cosh(x1));
  auto g = integrate_geodesic({x1, 0.0}, ang, 10.0, hyp);
  double s_at_x2 = -1.0;
  for (const auto& st : g.trajectory.steps) {
    double s;
    if (step_crossing(st, 0, x2, st.s0, s)) {
      s_at_x2 = s;
      break;
    }
  }
  REQUIRE(s_at_x2 > 0.0);
  CHECK(length_between_parallels(nu, x1, x2, hyp) ==
        doctest::Approx(s_at_x2).epsilon(1e-6));

  CHECK_THROWS_WITH_AS(length_between_parallels(1.0, 0.1, 3.0,
                                                WarpingFunction::gauss()),
                       doctest::Contains("turning point"), std::runtime_error);
}

TEST_CASE("length lower bound") {
  const auto euclid = WarpingFunction::euclidean();
  CHECK(length_lower_bound(0.0, 0.0, 4.0, euclid) == doctest::Approx(4.0));
  CHECK(length_lower_bound(0.5, 1.0, 2.0, euclid) ==
        doctest::Approx(1.0 + 0.25 / std::sqrt(3.0)).epsilon(1e-9));
  CHECK(length_lower_bound(0.3, 2.0, 1.0, euclid) == doctest::Approx(-1.0));

  // Sampled geodesic legs dominate the bound.
  SampleRng rng(5, 1);
  for (const auto& w : {WarpingFunction::euclidean(), WarpingFunction::hyperbolic(),
                        WarpingFunction::gauss()}) {
    for (int i = 0; i < 10; ++i) {
      const double x0 = rng.uniform(0.2, 1.8);
      const double ang = rng.uniform(0.1, kPi - 0.1);
      auto g = integrate_geodesic({x0, 0.0}, ang, 5.0, w);
      const double t1 = std::min(g.start().x, g.end().x);
      const double t2 = std::max(g.start().x, g.end().x);
      CHECK(g.total_length >= length_lower_bound(g.clairaut, t1, t2, w) - 1e-8);
    }
  }
}

TEST_CASE("distance on the flat model") {
  const auto w = WarpingFunction::euclidean();
  CHECK(distance({1.5, 0.3}, {1.5, 0.3}, w).distance == doctest::Approx(0.0));
  auto dr = distance({1.0, 0.0}, {4.0, 4.0}, w);
  CHECK(dr.distance == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(dr.geodesic.end().x == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(dr.geodesic.end().y == doctest::Approx(4.0).epsilon(1e-8));

  SampleRng rng(17, 2);
  for (int i = 0; i < 25; ++i) {
    const double x1 = rng.uniform(0.0, 3.0), y1 = rng.uniform(-2.0, 2.0);
    const double x2 = rng.uniform(0.0, 3.0), y2 = rng.uniform(-2.0, 2.0);
    const double d = distance({x1, y1}, {x2, y2}, w).distance;
    CHECK(d == doctest::Approx(oracles::flat_distance(x1, y1, x2, y2))
                   .epsilon(1e-8));
  }
}

TEST_CASE("distance on the hyperbolic model matches the Fermi oracle") {
  const auto w = WarpingFunction::hyperbolic();
  auto dr = distance({1.0, 0.0}, {2.0, 1.0}, w);
  CHECK(dr.distance ==
        doctest::Approx(oracles::fermi_distance(1.0, 2.0, 1.0)).epsilon(1e-8));

  SampleRng rng(23, 3);
  for (int i = 0; i < 25; ++i) {
    const double x1 = rng.uniform(0.0, 2.5), x2 = rng.uniform(0.0, 2.5);
    const double dy = rng.uniform(0.0, 3.0);
    const double d = distance({x1, 0.25}, {x2, 0.25 + dy}, w).distance;
    CHECK(d == doctest::Approx(oracles::fermi_distance(x1, x2, dy))
                   .epsilon(1e-7));
  }
}

TEST_CASE("distance symmetry and triangle inequality") {
  SampleRng rng(29, 4);
  for (const auto& w : {WarpingFunction::euclidean(), WarpingFunction::hyperbolic(),
                        WarpingFunction::gauss()}) {
    for (int i = 0; i < 8; ++i) {
      const ModelPoint a{rng.uniform(0.1, 2.0), rng.uniform(-1.0, 1.0)};
      const ModelPoint b{rng.uniform(0.1, 2.0), rng.uniform(-1.0, 1.0)};
      const ModelPoint c{rng.uniform(0.1, 2.0), rng.uniform(-1.0, 1.0)};
      const double dab = distance(a, b, w).distance;
      const double dba = distance(b, a, w).distance;
      const double dac = distance(a, c, w).distance;
      const double dcb = distance(c, b, w).distance;
      CHECK(std::abs(dab - dba) < 1e-7);
      CHECK(dab <= dac + dcb + 1e-7);
    }
  }
}

TEST_CASE("distance to parallel arcs") {
  const auto euclid = WarpingFunction::euclidean();
  CHECK(distance_to_parallel({1.0, 0.0}, 1.0, 0.0, euclid) ==
        doctest::Approx(0.0));
  CHECK(distance_to_parallel({1.0, 0.0}, 2.0, 3.0, euclid) ==
        doctest::Approx(std::sqrt(10.0)).epsilon(1e-9));

  // Strict monotonicity in the foot parameter (gauss family).
  const auto gauss = WarpingFunction::gauss();
  double prev = 0.0;
  for (double s : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0}) {
    const double d = distance_to_parallel({1.0, 0.0}, 1.0, s, gauss);
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("conjugate point search") {
  const auto euclid = WarpingFunction::euclidean();
  const auto hyp = WarpingFunction::hyperbolic();
  const auto gauss = WarpingFunction::gauss();
  auto ge = integrate_geodesic({1.0, 0.0}, kPi / 3, 8.0, euclid);
  CHECK(!conjugate_point_search(ge, euclid));
  auto gh = integrate_geodesic({1.0, 0.0}, kPi / 3, 8.0, hyp);
  CHECK(!conjugate_point_search(gh, hyp));
  // A geodesic sweeping the high-curvature region near the boundary.
  auto gg = integrate_geodesic({0.1, 0.0}, kPi / 2 - 0.2, 6.0, gauss);
  auto conj = conjugate_point_search(gg, gauss);
  REQUIRE(conj.has_value());
  CHECK(*conj > 0.0);
  CHECK(*conj < 6.0);
}

TEST_CASE("csv export shape") {
  const auto w = WarpingFunction::euclidean();
  auto g = integrate_geodesic({1.0, 0.0}, 0.3, 1.0, w);
  std::ostringstream os;
  write_geodesic_csv(os, g, w);
  const std::string out = os.str();
  CHECK(out.rfind("s,x,y,angle,nu\n", 0) == 0);
  CHECK(std::count(out.begin(), out.end(), '\n') ==
        static_cast<long>(g.path.size()) + 1);
}
