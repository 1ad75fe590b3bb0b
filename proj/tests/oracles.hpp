#ifndef OPENTRI_TESTS_ORACLES_HPP
#define OPENTRI_TESTS_ORACLES_HPP

#include <cmath>

// Test-only oracles, independent of the solver paths they check.

namespace oracles {

// Flat half-plane distance.
inline double flat_distance(double x1, double y1, double x2, double y2) {
  return std::hypot(x2 - x1, y2 - y1);
}

// Fermi-coordinate distance on the cosh model (hyperbolic plane around a
// geodesic): cosh d = cosh x1 cosh x2 cosh(dy) - sinh x1 sinh x2.
inline double fermi_distance(double x1, double x2, double dy) {
  const double arg = std::cosh(x1) * std::cosh(x2) * std::cosh(dy) -
                     std::sinh(x1) * std::sinh(x2);
  return std::acosh(arg < 1.0 ? 1.0 : arg);
}

// Foot gap of the flat model triangle.
inline double flat_theta(double a, double b, double c) {
  return std::sqrt(b * b - (a - c) * (a - c));
}

// Foot gap of the cosh model triangle: invert the Fermi formula in dy.
inline double fermi_theta(double a, double b, double c) {
  const double arg = (std::cosh(b) + std::sinh(a) * std::sinh(c)) /
                     (std::cosh(a) * std::cosh(c));
  return std::acosh(arg < 1.0 ? 1.0 : arg);
}

}  // namespace oracles

#endif
