#ifndef OPENTRI_JACOBI_HPP
#define OPENTRI_JACOBI_HPP

#include <optional>
#include <string>

#include "opentri/ode.hpp"
#include "opentri/warping.hpp"

// Scalar Jacobi-field equations f'' + K f = 0, focal points, the index form
// with its shape-operator boundary correction, and the two-ODE comparison
// check behind the splitting argument.

namespace opentri {

struct JacobiSolution {
  CurvatureProfile curvature;
  double f0 = 1.0;
  double fp0 = 0.0;
  double horizon = 0.0;
  OdeTrajectory<2> trajectory;  // (f, f')

  double f(double t) const { return trajectory.eval(0, t); }
  double fp(double t) const { return trajectory.eval(1, t); }

  // Max |f'' + K f| sampled between nodes (dense-output consistency).
  double residual() const;
};

JacobiSolution solve_jacobi(const CurvatureProfile& K, double f0, double fp0,
                            double horizon);

// First zero of the solution on (0, horizon], refined by bisection.
std::optional<double> first_zero(const JacobiSolution& sol);

// First zero of the boundary Jacobi field f(0)=1, f'(0)=-lambda for a
// convex boundary with shape eigenvalue lambda >= 0.
std::optional<double> focal_distance(const CurvatureProfile& K, double lambda,
                                     double horizon);

struct IndexFormValue {
  double value = 0.0;
  double lambda = 0.0;
};

// Quadrature of (f'^2 - K f^2) over [0, ell] minus lambda f(0)^2, for any
// (f, f') profile carried by a JacobiSolution-shaped field. For a Jacobi
// field of K this equals the boundary term f(l)f'(l) - f(0)f'(0) - l f(0)^2.
IndexFormValue index_form(const JacobiSolution& field,
                          const CurvatureProfile& K, double ell,
                          double lambda);

// The field m(t)/m(ell) along a boundary-perpendicular model geodesic.
JacobiSolution model_parallel_field(const WarpingFunction& w, double ell);

struct ComparisonL1Report {
  bool hypothesis_met = false;   // K >= G - tol on the grid and divergence
  bool f_vanished = false;       // solution hit zero before the horizon
  double first_zero_at = -1.0;
  double max_kg_gap = 0.0;       // max |K - G| on the grid
  bool equality_within_tol = false;
  std::string note;
};

// Checks the rigidity branch of the scalar comparison lemma: with
// K >= G, divergent integral of 1/m^2, and the K-solution with f(0)=1,
// f'(0)=0 positive up to the horizon, K must coincide with G.
ComparisonL1Report comparison_L1_check(const CurvatureProfile& K,
                                       const WarpingFunction& w,
                                       double horizon, double tol);

}  // namespace opentri

#endif
