#ifndef OPENTRI_WARPING_HPP
#define OPENTRI_WARPING_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "opentri/ode.hpp"

// Warping functions m with m(0) = 1, m'(0) = 0, m > 0 and the radial
// curvature profiles G they are tied to through m'' + G m = 0. A model
// half-plane is [0, inf) x R with metric dx^2 + m(x)^2 dy^2; every other
// module consumes warpings through this interface.

namespace opentri {

// Piecewise polynomial in (t - t0) per piece; the config-file form of an
// inline curvature profile.
struct PiecewisePolynomial {
  struct Piece {
    double t0 = 0.0;
    double t1 = 0.0;
    std::vector<double> coeffs;  // c0 + c1*(t-t0) + c2*(t-t0)^2 + ...
  };
  std::vector<Piece> pieces;

  double eval(double t) const;
};

struct CurvatureProfile {
  std::function<double(double)> g;
  std::string continuity = "smooth";

  static CurvatureProfile constant(double k);
  static CurvatureProfile from_polynomial(const PiecewisePolynomial& poly);

  double operator()(double t) const { return g(t); }
};

enum class WarpingKind { Euclidean, Hyperbolic, Gauss, Custom, CurvatureDerived };

class WarpingFunction {
 public:
  struct Eval {
    double m;
    double mp;
    double mpp;
  };

  static WarpingFunction euclidean(double domain_max = 20.0);
  static WarpingFunction hyperbolic(double domain_max = 20.0);
  static WarpingFunction gauss(double domain_max = 20.0);

  // Closed-form warping supplied as callables (m, m', m'').
  static WarpingFunction closed_form(std::string name,
                                     std::function<double(double)> m,
                                     std::function<double(double)> mp,
                                     std::function<double(double)> mpp,
                                     double domain_max = 20.0);

  // Tag lookup for config files: "euclidean" | "hyperbolic" | "gauss".
  static WarpingFunction from_tag(const std::string& tag,
                                  double domain_max = 20.0);

  // Integrate m'' + G m = 0, m(0)=1, m'(0)=0 and tabulate. Throws if m
  // crosses zero inside [0, domain_max] ("warping degenerate at t*").
  static WarpingFunction from_curvature(const CurvatureProfile& profile,
                                        double domain_max, double tol = 1e-10);

  // Value and first two derivatives at t in [0, domain_max]; for the
  // tabulated kind m'' is reconstructed as -G(t) m(t).
  Eval evaluate(double t) const;

  // G(t) = -m''(t) / m(t).
  double radial_curvature(double t) const;

  // Evaluation without the domain guard, extended evenly through t = 0 and
  // by a solved margin above domain_max. Integrators use this so that a
  // step may overshoot an event before being truncated back.
  Eval evaluate_extended(double t) const;

  double domain_max() const { return domain_max_; }
  WarpingKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  // Maximum ODE residual |m'' + G m| sampled between tabulation nodes; zero
  // for closed forms.
  double ode_residual() const;

 private:
  WarpingFunction() = default;

  WarpingKind kind_ = WarpingKind::Euclidean;
  std::string name_;
  double domain_max_ = 20.0;
  double margin_ = 1.0;

  std::function<double(double)> m_, mp_, mpp_;  // closed forms

  std::shared_ptr<const OdeTrajectory<2>> table_;  // (m, m') tabulation
  std::function<double(double)> profile_;          // G for tabulated kind
};

enum class SplittingClass { ST1, ST2, Neither, Inconclusive };

std::string to_string(SplittingClass c);

// Partial-integral divergence surrogate for int_0^inf dt / m(t)^2 evaluated
// on [0, horizon]: grows by more than tol on the upper half with no decay in
// the integrand's running mean.
bool reciprocal_square_integral_diverges(const WarpingFunction& w,
                                         double horizon, double tol = 1e-6,
                                         int grid_n = 4096);

// Numerical classification of the splitting behaviour of a model. ST2 takes
// precedence: a warping can satisfy both asymptotic conditions, and the
// vanishing-inf test is the sharper desk-scale signal. The result is a
// heuristic label, reported as such.
SplittingClass splitting_class(const WarpingFunction& w, double horizon,
                               double tol = 1e-6, int grid_n = 4096);

}  // namespace opentri

#endif
