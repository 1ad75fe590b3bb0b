#include "opentri/jacobi.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "opentri/numerics.hpp"

namespace opentri {

namespace {

// 5-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGl5Nodes[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                                 0.538469310105683, 0.906179845938664};
constexpr double kGl5Weights[5] = {0.236926885056189, 0.478628670499366,
                                   0.568888888888889, 0.478628670499366,
                                   0.236926885056189};

std::optional<double> first_zero_of(const OdeTrajectory<2>& traj) {
  for (const auto& st : traj.steps) {
    double s_z;
    if (step_crossing(st, 0, 0.0, std::max(st.s0, 1e-12), s_z)) return s_z;
  }
  return std::nullopt;
}

}  // namespace

double JacobiSolution::residual() const {
  double worst = 0.0;
  for (const auto& st : trajectory.steps) {
    const double mid = 0.5 * (st.s0 + st.s1);
    const double h = std::max(1e-6, 0.02 * st.width());
    const double lo = std::max(mid - h, st.s0), hi = std::min(mid + h, st.s1);
    const double fpp_fd = (st.eval(1, hi) - st.eval(1, lo)) / (hi - lo);
    worst = std::max(worst,
                     std::abs(fpp_fd + curvature(mid) * st.eval(0, mid)));
  }
  return worst;
}

JacobiSolution solve_jacobi(const CurvatureProfile& K, double f0, double fp0,
                            double horizon) {
  if (horizon <= 0.0) throw std::invalid_argument("horizon must be positive");
  JacobiSolution sol;
  sol.curvature = K;
  sol.f0 = f0;
  sol.fp0 = fp0;
  sol.horizon = horizon;
  auto g = K.g;
  auto rhs = [&g](double t, const OdeState<2>& y) {
    return OdeState<2>{y[1], -g(t) * y[0]};
  };
  OdeOptions opt;
  opt.abs_tol = opt.rel_tol = 1e-12;
  opt.max_step = 0.1;
  integrate_ode<2>(rhs, 0.0, OdeState<2>{f0, fp0}, horizon, opt,
                   sol.trajectory);
  return sol;
}

std::optional<double> first_zero(const JacobiSolution& sol) {
  return first_zero_of(sol.trajectory);
}

std::optional<double> focal_distance(const CurvatureProfile& K, double lambda,
                                     double horizon) {
  if (lambda < 0.0)
    throw std::invalid_argument("convex boundary needs lambda >= 0");
  return first_zero(solve_jacobi(K, 1.0, -lambda, horizon));
}

IndexFormValue index_form(const JacobiSolution& field,
                          const CurvatureProfile& K, double ell,
                          double lambda) {
  if (ell <= 0.0 || ell > field.horizon + 1e-12)
    throw std::invalid_argument("index form needs 0 < ell <= horizon");
  double acc = 0.0;
  for (const auto& st : field.trajectory.steps) {
    const double lo = st.s0;
    const double hi = std::min(st.s1, ell);
    if (hi <= lo) break;
    const double hl = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (int i = 0; i < 5; ++i) {
      const double t = mid + hl * kGl5Nodes[i];
      const double f = st.eval(0, t);
      const double fp = st.eval(1, t);
      acc += kGl5Weights[i] * (fp * fp - K(t) * f * f) * hl;
    }
    if (st.s1 >= ell) break;
  }
  const double f_at_0 = field.f(0.0);
  return {acc - lambda * f_at_0 * f_at_0, lambda};
}

JacobiSolution model_parallel_field(const WarpingFunction& w, double ell) {
  if (ell <= 0.0 || ell > w.domain_max())
    throw std::invalid_argument("parallel field needs 0 < ell <= domain_max");
  // f = m / m(ell) solves f'' + G f = 0 by construction; re-integrating the
  // warping ODE here keeps the field an honest JacobiSolution.
  CurvatureProfile prof;
  prof.g = [w](double t) { return w.radial_curvature(t); };
  const double scale = w.evaluate(ell).m;
  JacobiSolution sol = solve_jacobi(prof, 1.0 / scale, 0.0, ell);
  return sol;
}

ComparisonL1Report comparison_L1_check(const CurvatureProfile& K,
                                       const WarpingFunction& w,
                                       double horizon, double tol) {
  if (horizon <= 0.0 || horizon > w.domain_max())
    throw std::invalid_argument("bad comparison horizon");

  ComparisonL1Report rep;
  const int n = 2048;
  double max_gap = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = horizon * i / n;
    const double g = w.radial_curvature(t);
    const double k = K(t);
    if (k < g - tol) {
      std::ostringstream msg;
      msg << "hypothesis violation: K(t) < G(t) - tol at t=" << t;
      throw std::invalid_argument(msg.str());
    }
    max_gap = std::max(max_gap, std::abs(k - g));
  }
  rep.max_kg_gap = max_gap;

  if (!reciprocal_square_integral_diverges(w, horizon)) {
    rep.note = "inconclusive: integral of 1/m^2 does not diverge numerically";
    return rep;
  }
  rep.hypothesis_met = true;

  JacobiSolution f = solve_jacobi(K, 1.0, 0.0, horizon);
  const auto zero = first_zero(f);
  if (zero) {
    rep.f_vanished = true;
    rep.first_zero_at = *zero;
    rep.note = "f vanished; positivity branch vacuous";
    return rep;
  }
  // "Stays positive": min above a floor, confirmed at halved step size.
  double min_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 4 * n; ++i)
    min_f = std::min(min_f, f.f(horizon * i / (4.0 * n)));
  if (min_f <= 1e-6) {
    rep.f_vanished = true;
    rep.note = "f grazes zero at the resolution floor";
    return rep;
  }
  rep.equality_within_tol = max_gap < tol;
  rep.note = rep.equality_within_tol
                 ? "f positive and K == G within tolerance"
                 : "violation: f positive but K deviates from G";
  return rep;
}

}  // namespace opentri
