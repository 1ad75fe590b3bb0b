#ifndef OPENTRI_ODE_HPP
#define OPENTRI_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

// Adaptive Dormand-Prince 5(4) integrator with per-step Hermite dense output.
// All solvers in this project (warping ODE, geodesics, Jacobi fields) run on
// this engine; callers watch accepted steps to detect events and truncate.

namespace opentri {

template <std::size_t N>
using OdeState = std::array<double, N>;

struct OdeOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double max_step = 0.25;
  std::size_t max_steps = 4000000;
};

// One accepted step. Endpoint values and derivatives give a cubic Hermite
// interpolant per component, the dense-output scheme used project-wide.
template <std::size_t N>
struct OdeStep {
  double s0 = 0.0;
  double s1 = 0.0;
  OdeState<N> y0{};
  OdeState<N> y1{};
  OdeState<N> f0{};
  OdeState<N> f1{};

  double width() const { return s1 - s0; }

  double eval(std::size_t i, double s) const {
    const double h = s1 - s0;
    if (h == 0.0) return y1[i];
    const double u = (s - s0) / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0[i] + (u3 - 2 * u2 + u) * h * f0[i] +
           (-2 * u3 + 3 * u2) * y1[i] + (u3 - u2) * h * f1[i];
  }

  double eval_derivative(std::size_t i, double s) const {
    const double h = s1 - s0;
    if (h == 0.0) return f1[i];
    const double u = (s - s0) / h;
    const double u2 = u * u;
    return ((6 * u2 - 6 * u) * y0[i] + (3 * u2 - 4 * u + 1) * h * f0[i] +
            (-6 * u2 + 6 * u) * y1[i] + (3 * u2 - 2 * u) * h * f1[i]) /
           h;
  }
};

template <std::size_t N>
struct OdeTrajectory {
  std::vector<OdeStep<N>> steps;

  bool empty() const { return steps.empty(); }
  double s_begin() const { return steps.empty() ? 0.0 : steps.front().s0; }
  double s_end() const { return steps.empty() ? 0.0 : steps.back().s1; }

  const OdeStep<N>& step_at(double s) const {
    if (steps.empty()) throw std::logic_error("empty trajectory");
    std::size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (s <= steps[mid].s1)
        hi = mid;
      else
        lo = mid + 1;
    }
    return steps[lo];
  }

  double eval(std::size_t i, double s) const { return step_at(s).eval(i, s); }

  OdeState<N> eval(double s) const {
    const OdeStep<N>& st = step_at(s);
    OdeState<N> y;
    for (std::size_t i = 0; i < N; ++i) y[i] = st.eval(i, s);
    return y;
  }

  double eval_derivative(std::size_t i, double s) const {
    return step_at(s).eval_derivative(i, s);
  }

  // Truncate the trajectory at s (final partial step keeps its Hermite data
  // from the integrator, so interpolation inside it stays valid).
  void truncate(double s) {
    while (!steps.empty() && steps.back().s0 >= s) steps.pop_back();
    if (steps.empty()) return;
    OdeStep<N>& last = steps.back();
    if (s < last.s1) {
      OdeStep<N> cut = last;
      cut.s1 = s;
      for (std::size_t i = 0; i < N; ++i) {
        cut.y1[i] = last.eval(i, s);
        cut.f1[i] = last.eval_derivative(i, s);
      }
      last = cut;
    }
  }
};

enum class StepControl { Continue, Stop };

// Integrates y' = rhs(s, y) from (s0, y0) to s_end. The watcher sees every
// accepted step and may stop the run (after the caller has truncated or
// recorded whatever it needs). Returns the reached end of integration.
template <std::size_t N, typename Rhs, typename Watcher>
double integrate_ode(Rhs&& rhs, double s0, const OdeState<N>& y0, double s_end,
                     const OdeOptions& opt, OdeTrajectory<N>& out,
                     Watcher&& watcher) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  out.steps.clear();
  if (s_end <= s0) return s0;

  double s = s0;
  OdeState<N> y = y0;
  OdeState<N> k1 = rhs(s, y);
  double h = std::min(opt.max_step, s_end - s0);

  OdeState<N> k2, k3, k4, k5, k6, k7, ytmp, ynew;
  for (std::size_t step_count = 0; step_count < opt.max_steps; ++step_count) {
    if (s >= s_end) return s;
    h = std::min(h, s_end - s);
    if (h < 1e-14 * (1.0 + std::abs(s))) h = 1e-14 * (1.0 + std::abs(s));

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    k2 = rhs(s + c2 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(s + c3 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(s + c4 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] =
          y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(s + c5 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(s + h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                            b6 * k6[i]);
    k7 = rhs(s + h, ynew);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc =
          opt.abs_tol +
          opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                             e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      err += (ei / sc) * (ei / sc);
    }
    err = std::sqrt(err / N);

    if (err <= 1.0 || h <= 1e-13 * (1.0 + std::abs(s))) {
      OdeStep<N> st;
      st.s0 = s;
      st.s1 = s + h;
      st.y0 = y;
      st.y1 = ynew;
      st.f0 = k1;
      st.f1 = k7;
      out.steps.push_back(st);
      s += h;
      y = ynew;
      k1 = k7;
      if (watcher(out.steps.back()) == StepControl::Stop) return s;
    }
    const double factor =
        (err <= 0.0) ? 5.0
                     : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = std::min(h * factor, opt.max_step);
  }
  throw std::runtime_error("ODE integration exceeded max step count");
}

template <std::size_t N, typename Rhs>
double integrate_ode(Rhs&& rhs, double s0, const OdeState<N>& y0, double s_end,
                     const OdeOptions& opt, OdeTrajectory<N>& out) {
  return integrate_ode<N>(std::forward<Rhs>(rhs), s0, y0, s_end, opt, out,
                          [](const OdeStep<N>&) { return StepControl::Continue; });
}

// First root of component i minus `target` inside one step, if any, found by
// bisection on the Hermite interpolant. Roots closer than `s_skip` to the
// step start are ignored (used to skip an event at the initial point).
template <std::size_t N>
bool step_crossing(const OdeStep<N>& st, std::size_t i, double target,
                   double s_skip, double& s_root) {
  const int samples = 8;
  double prev_s = std::max(st.s0, s_skip);
  if (prev_s >= st.s1) return false;
  double prev_v = st.eval(i, prev_s) - target;
  if (prev_v == 0.0) {
    s_root = prev_s;
    return true;
  }
  for (int k = 1; k <= samples; ++k) {
    const double sk = prev_s + (st.s1 - prev_s) * k / samples;
    const double vk = st.eval(i, sk) - target;
    if (vk == 0.0 || (prev_v < 0) != (vk < 0)) {
      double lo = prev_s, hi = sk, flo = prev_v;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = st.eval(i, mid) - target;
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((flo < 0) != (fm < 0))
          hi = mid;
        else {
          lo = mid;
          flo = fm;
        }
        if (hi - lo < 1e-15 * (1.0 + std::abs(hi))) break;
      }
      s_root = 0.5 * (lo + hi);
      return true;
    }
    prev_s = sk;
    prev_v = vk;
  }
  return false;
}

}  // namespace opentri

#endif
