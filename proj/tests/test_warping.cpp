#include <doctest.h>

#include <cmath>

#include "opentri/warping.hpp"

using namespace opentri;

TEST_CASE("closed-form evaluation") {
  const auto euclid = WarpingFunction::euclidean();
  const auto hyp = WarpingFunction::hyperbolic();
  const auto gauss = WarpingFunction::gauss();

  auto e = euclid.evaluate(3.7);
  CHECK(e.m == 1.0);
  CHECK(e.mp == 0.0);
  CHECK(e.mpp == 0.0);

  auto h0 = hyp.evaluate(0.0);
  CHECK(h0.m == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(h0.mp == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(h0.mpp == doctest::Approx(1.0).epsilon(1e-14));

  auto g1 = gauss.evaluate(1.0);
  const double e1 = std::exp(-1.0);
  CHECK(g1.m == doctest::Approx(e1).epsilon(1e-14));
  CHECK(g1.mp == doctest::Approx(-2.0 * e1).epsilon(1e-14));
  CHECK(g1.mpp == doctest::Approx(2.0 * e1).epsilon(1e-14));
}

TEST_CASE("initial conditions") {
  for (const auto& w : {WarpingFunction::euclidean(), WarpingFunction::hyperbolic(),
                        WarpingFunction::gauss()}) {
    const auto e0 = w.evaluate(0.0);
    CHECK(std::abs(e0.m - 1.0) < 1e-10);
    CHECK(std::abs(e0.mp) < 1e-10);
  }
}

TEST_CASE("domain guard") {
  const auto w = WarpingFunction::euclidean(20.0);
  CHECK_THROWS_AS(w.evaluate(-0.1), std::domain_error);
  CHECK_THROWS_AS(w.evaluate(20.5), std::domain_error);
}

TEST_CASE("radial curvature of the shipped families") {
  const auto euclid = WarpingFunction::euclidean();
  const auto hyp = WarpingFunction::hyperbolic();
  const auto gauss = WarpingFunction::gauss();
  CHECK(euclid.radial_curvature(1.3) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(hyp.radial_curvature(0.7) == doctest::Approx(-1.0).epsilon(1e-12));
  for (double t : {0.0, 0.5, 1.0, 2.0})
    CHECK(gauss.radial_curvature(t) ==
          doctest::Approx(2.0 - 4.0 * t * t).epsilon(1e-12));
}

TEST_CASE("solve_from_curvature closed-form checks") {
  SUBCASE("flat profile gives the constant function") {
    auto w = WarpingFunction::from_curvature(CurvatureProfile::constant(0.0),
                                             10.0);
    for (double t : {0.0, 1.0, 5.0, 9.5}) {
      CHECK(std::abs(w.evaluate(t).m - 1.0) < 1e-10);
      CHECK(std::abs(w.evaluate(t).mp) < 1e-10);
    }
  }
  SUBCASE("constant -1 gives cosh") {
    auto w = WarpingFunction::from_curvature(CurvatureProfile::constant(-1.0),
                                             10.0);
    CHECK(std::abs(w.evaluate(1.0).m - 1.5430806348152437) < 1e-8);
  }
  SUBCASE("gauss profile reproduces exp(-t^2)") {
    CurvatureProfile prof;
    prof.g = [](double t) { return 2.0 - 4.0 * t * t; };
    auto w = WarpingFunction::from_curvature(prof, 6.0);
    CHECK(std::abs(w.evaluate(2.0).m - std::exp(-4.0)) < 1e-8);
  }
  SUBCASE("positive constant curvature degenerates") {
    CHECK_THROWS_WITH_AS(
        WarpingFunction::from_curvature(CurvatureProfile::constant(1.0), 10.0),
        doctest::Contains("warping degenerate"), std::runtime_error);
  }
}

TEST_CASE("tabulated ODE residual and initial data") {
  CurvatureProfile prof;
  prof.g = [](double t) { return 0.5 * std::sin(t) - 0.2; };
  auto w = WarpingFunction::from_curvature(prof, 12.0);
  CHECK(w.ode_residual() < 1e-8);
  CHECK(std::abs(w.evaluate(0.0).m - 1.0) < 1e-10);
  CHECK(std::abs(w.evaluate(0.0).mp) < 1e-10);
}

TEST_CASE("curvature round trip on the closed forms") {
  for (const auto& w : {WarpingFunction::euclidean(), WarpingFunction::hyperbolic(),
                        WarpingFunction::gauss()}) {
    CurvatureProfile prof;
    prof.g = [&w](double t) { return w.radial_curvature(t); };
    auto back = WarpingFunction::from_curvature(prof, 8.0);
    for (int i = 0; i <= 40; ++i) {
      const double t = 8.0 * i / 40.0;
      CHECK(std::abs(back.evaluate(t).m - w.evaluate(t).m) < 1e-6);
    }
  }
}

TEST_CASE("piecewise polynomial profiles") {
  PiecewisePolynomial poly;
  poly.pieces.push_back({0.0, 1.0, {-1.0}});
  poly.pieces.push_back({1.0, 20.0, {-1.0, 0.5}});
  auto prof = CurvatureProfile::from_polynomial(poly);
  CHECK(prof(0.5) == doctest::Approx(-1.0));
  CHECK(prof(2.0) == doctest::Approx(-0.5));
  auto w = WarpingFunction::from_curvature(prof, 5.0);
  CHECK(w.evaluate(3.0).m > 0.0);
}

TEST_CASE("splitting classification fixtures") {
  const double horizon = 20.0;
  CHECK(splitting_class(WarpingFunction::euclidean(), horizon) ==
        SplittingClass::ST1);
  CHECK(splitting_class(WarpingFunction::gauss(), horizon) ==
        SplittingClass::ST2);
  CHECK(splitting_class(WarpingFunction::hyperbolic(), horizon) ==
        SplittingClass::Neither);
}

TEST_CASE("splitting classification is grid-stable") {
  const double horizon = 20.0;
  for (const auto& w : {WarpingFunction::euclidean(), WarpingFunction::hyperbolic(),
                        WarpingFunction::gauss()}) {
    const auto coarse = splitting_class(w, horizon, 1e-6, 4096);
    const auto fine = splitting_class(w, horizon, 1e-6, 8192);
    CHECK(coarse == fine);
  }
}

TEST_CASE("divergence surrogate") {
  CHECK(reciprocal_square_integral_diverges(WarpingFunction::euclidean(), 20.0));
  CHECK_FALSE(
      reciprocal_square_integral_diverges(WarpingFunction::hyperbolic(), 20.0));
}
