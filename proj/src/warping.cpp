#include "opentri/warping.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "opentri/numerics.hpp"

namespace opentri {

double PiecewisePolynomial::eval(double t) const {
  if (pieces.empty()) return 0.0;
  const Piece* chosen = &pieces.front();
  if (t < chosen->t0) t = chosen->t0;
  for (const Piece& p : pieces) {
    if (t >= p.t0) chosen = &p;
  }
  const double u = std::min(t, chosen->t1) - chosen->t0;
  double v = 0.0;
  for (std::size_t i = chosen->coeffs.size(); i-- > 0;)
    v = v * u + chosen->coeffs[i];
  return v;
}

CurvatureProfile CurvatureProfile::constant(double k) {
  CurvatureProfile p;
  p.g = [k](double) { return k; };
  return p;
}

CurvatureProfile CurvatureProfile::from_polynomial(
    const PiecewisePolynomial& poly) {
  CurvatureProfile p;
  p.g = [poly](double t) { return poly.eval(t); };
  p.continuity = "piecewise-polynomial";
  return p;
}

WarpingFunction WarpingFunction::closed_form(std::string name,
                                             std::function<double(double)> m,
                                             std::function<double(double)> mp,
                                             std::function<double(double)> mpp,
                                             double domain_max) {
  WarpingFunction w;
  w.kind_ = WarpingKind::Custom;
  w.name_ = std::move(name);
  w.domain_max_ = domain_max;
  w.m_ = std::move(m);
  w.mp_ = std::move(mp);
  w.mpp_ = std::move(mpp);
  return w;
}

WarpingFunction WarpingFunction::euclidean(double domain_max) {
  WarpingFunction w = closed_form(
      "euclidean", [](double) { return 1.0; }, [](double) { return 0.0; },
      [](double) { return 0.0; }, domain_max);
  w.kind_ = WarpingKind::Euclidean;
  return w;
}

WarpingFunction WarpingFunction::hyperbolic(double domain_max) {
  WarpingFunction w = closed_form(
      "hyperbolic", [](double t) { return std::cosh(t); },
      [](double t) { return std::sinh(t); },
      [](double t) { return std::cosh(t); }, domain_max);
  w.kind_ = WarpingKind::Hyperbolic;
  return w;
}

WarpingFunction WarpingFunction::gauss(double domain_max) {
  WarpingFunction w = closed_form(
      "gauss", [](double t) { return std::exp(-t * t); },
      [](double t) { return -2.0 * t * std::exp(-t * t); },
      [](double t) { return (4.0 * t * t - 2.0) * std::exp(-t * t); },
      domain_max);
  w.kind_ = WarpingKind::Gauss;
  return w;
}

WarpingFunction WarpingFunction::from_tag(const std::string& tag,
                                          double domain_max) {
  if (tag == "euclidean") return euclidean(domain_max);
  if (tag == "hyperbolic") return hyperbolic(domain_max);
  if (tag == "gauss") return gauss(domain_max);
  throw std::invalid_argument("unknown warping tag: " + tag);
}

WarpingFunction WarpingFunction::from_curvature(const CurvatureProfile& profile,
                                                double domain_max, double tol) {
  WarpingFunction w;
  w.kind_ = WarpingKind::CurvatureDerived;
  w.name_ = "curvature-derived";
  w.domain_max_ = domain_max;
  w.profile_ = profile.g;

  auto g = profile.g;
  // The profile is defined on [0, domain_max]; extend evenly below zero and
  // by clamping above so the tabulation margin stays solvable.
  auto g_ext = [g, domain_max](double t) {
    if (t < 0.0) t = -t;
    if (t > domain_max) t = domain_max;
    return g(t);
  };
  auto rhs = [&g_ext](double t, const OdeState<2>& y) {
    return OdeState<2>{y[1], -g_ext(t) * y[0]};
  };

  OdeOptions opt;
  opt.abs_tol = tol * 1e-2;
  opt.rel_tol = tol * 1e-2;
  opt.max_step = 0.05;

  auto table = std::make_shared<OdeTrajectory<2>>();
  double degenerate_at = -1.0;
  integrate_ode<2>(rhs, 0.0, OdeState<2>{1.0, 0.0}, domain_max + w.margin_,
                   opt, *table, [&](const OdeStep<2>& st) {
                     double s_root;
                     if (step_crossing(st, 0, 0.0, st.s0, s_root)) {
                       degenerate_at = s_root;
                       return StepControl::Stop;
                     }
                     return StepControl::Continue;
                   });
  if (degenerate_at >= 0.0 && degenerate_at <= domain_max) {
    std::ostringstream msg;
    msg << "warping degenerate at t=" << degenerate_at
        << ": profile does not define a model surface on [0, " << domain_max
        << "]";
    throw std::runtime_error(msg.str());
  }
  if (degenerate_at >= 0.0) {
    table->truncate(degenerate_at - 1e-9);
    w.margin_ = table->s_end() - domain_max;
  }
  w.table_ = table;
  return w;
}

WarpingFunction::Eval WarpingFunction::evaluate_extended(double t) const {
  double sign = 1.0;
  if (t < 0.0) {
    t = -t;
    sign = -1.0;  // even extension: m even, m' odd
  }
  if (kind_ == WarpingKind::CurvatureDerived) {
    const double t_hi = table_->s_end();
    if (t > t_hi) t = t_hi;  // clamp; integrators stop at the window anyway
    const double m = table_->eval(0, t);
    const double mp = table_->eval(1, t);
    const double g = profile_(std::min(t, domain_max_));
    return {m, sign * mp, -g * m};
  }
  const double t_hi = domain_max_ + margin_;
  if (t > t_hi) t = t_hi;
  return {m_(t), sign * mp_(t), mpp_(t)};
}

WarpingFunction::Eval WarpingFunction::evaluate(double t) const {
  if (t < 0.0 || t > domain_max_) {
    std::ostringstream msg;
    msg << "warping evaluation outside [0, " << domain_max_ << "]: t=" << t;
    throw std::domain_error(msg.str());
  }
  return evaluate_extended(t);
}

double WarpingFunction::radial_curvature(double t) const {
  const Eval e = evaluate(t);
  return -e.mpp / e.m;
}

double WarpingFunction::ode_residual() const {
  if (kind_ != WarpingKind::CurvatureDerived) return 0.0;
  // Between-node consistency of the dense output: difference the dense m'
  // against -G m at step midpoints.
  double worst = 0.0;
  for (const auto& st : table_->steps) {
    if (st.s0 > domain_max_) break;
    const double mid = 0.5 * (st.s0 + st.s1);
    const double h = std::max(1e-6, 0.02 * st.width());
    const double mpp_fd =
        (st.eval(1, std::min(mid + h, st.s1)) -
         st.eval(1, std::max(mid - h, st.s0))) /
        (std::min(mid + h, st.s1) - std::max(mid - h, st.s0));
    const double res = std::abs(mpp_fd + profile_(mid) * st.eval(0, mid));
    worst = std::max(worst, res);
  }
  return worst;
}

std::string to_string(SplittingClass c) {
  switch (c) {
    case SplittingClass::ST1:
      return "ST1";
    case SplittingClass::ST2:
      return "ST2";
    case SplittingClass::Neither:
      return "neither";
    case SplittingClass::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

namespace {
// Composite Simpson of 1/m^2 over [a, b] on n panels (n even).
double partial_integral(const WarpingFunction& w, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  auto f = [&w](double t) {
    const double m = w.evaluate(t).m;
    return 1.0 / (m * m);
  };
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return acc * h / 3.0;
}
}  // namespace

bool reciprocal_square_integral_diverges(const WarpingFunction& w,
                                         double horizon, double tol,
                                         int grid_n) {
  const double half = 0.5 * horizon;
  const double lower = partial_integral(w, 0.0, half, grid_n / 2);
  const double upper = partial_integral(w, half, horizon, grid_n / 2);
  if (upper <= tol) return false;
  const double mean_lower = lower / half;
  const double mean_upper = upper / half;
  return mean_upper >= 0.25 * mean_lower;
}

SplittingClass splitting_class(const WarpingFunction& w, double horizon,
                               double tol, int grid_n) {
  if (horizon > w.domain_max())
    throw std::domain_error("classification horizon exceeds domain_max");

  double inf_upper = std::numeric_limits<double>::infinity();
  double inf_all = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid_n; ++i) {
    const double t = horizon * i / grid_n;
    const double m = w.evaluate(t).m;
    inf_all = std::min(inf_all, m);
    if (t >= 0.5 * horizon) inf_upper = std::min(inf_upper, m);
  }

  if (inf_upper < tol) return SplittingClass::ST2;
  if (reciprocal_square_integral_diverges(w, horizon, tol, grid_n))
    return SplittingClass::ST1;

  // Convergent tail estimate: integrand at the horizon times the horizon.
  const double m_end = w.evaluate(horizon).m;
  const double tail = horizon / (m_end * m_end);
  if (tail < tol && inf_all >= tol) return SplittingClass::Neither;
  return SplittingClass::Inconclusive;
}

}  // namespace opentri
