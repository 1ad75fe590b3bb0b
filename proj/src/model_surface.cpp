#include "opentri/model_surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "opentri/numerics.hpp"
#include "opentri/shooting.hpp"

namespace opentri {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Full geodesic equations of dx^2 + m(x)^2 dy^2 in the state
// (x, y, x', y'). The Clairaut constant m^2 y' and the speed are first
// integrals, kept only to integration accuracy; the invariants are measured
// from the path, not enforced.
struct GeodesicRhs {
  const WarpingFunction* w;
  OdeState<4> operator()(double, const OdeState<4>& y) const {
    const auto e = w->evaluate_extended(y[0]);
    return OdeState<4>{y[2], y[3], e.m * e.mp * y[3] * y[3],
                       -2.0 * (e.mp / e.m) * y[2] * y[3]};
  }
};

struct TraceResult {
  OdeTrajectory<4> traj;
  GeodesicStatus status = GeodesicStatus::Completed;
  double s_end = 0.0;
  std::vector<detail::LevelCrossing> crossings;
};

TraceResult trace_from(const WarpingFunction& w, ModelPoint p, double angle,
                       double length, const OdeOptions& opt,
                       std::optional<double> crossing_level) {
  TraceResult result;
  if (length <= 0.0) {
    result.s_end = 0.0;
    return result;
  }
  const double m0 = w.evaluate_extended(p.x).m;
  const OdeState<4> y0{p.x, p.y, std::cos(angle), std::sin(angle) / m0};
  GeodesicRhs rhs{&w};
  const double x_max = w.domain_max();

  double last_crossing_s = -1.0;
  auto watcher = [&](const OdeStep<4>& st) {
    // Earliest terminal event inside the step, if any.
    double s_stop = std::numeric_limits<double>::infinity();
    GeodesicStatus stop_status = GeodesicStatus::Completed;

    double s_b;
    if (step_crossing(st, 0, 0.0, st.s0 == 0.0 ? 1e-12 : st.s0, s_b)) {
      const double xp = st.eval_derivative(0, s_b);
      if (xp < -1e-12 || st.y1[0] < -1e-14) {
        s_stop = s_b;
        stop_status = GeodesicStatus::HitBoundary;
      }
    }
    double s_w;
    if (step_crossing(st, 0, x_max, st.s0 == 0.0 ? 1e-12 : st.s0, s_w)) {
      if (st.eval_derivative(0, s_w) > 1e-12 || st.y1[0] > x_max + 1e-14) {
        if (s_w < s_stop) {
          s_stop = s_w;
          stop_status = GeodesicStatus::WindowExit;
        }
      }
    }

    if (crossing_level) {
      double skip = st.s0 == 0.0 ? 1e-12 : st.s0;
      double s_c;
      while (step_crossing(st, 0, *crossing_level, skip, s_c)) {
        if (s_c > s_stop) break;
        if (s_c - last_crossing_s > 1e-12) {
          result.crossings.push_back({s_c, st.eval(1, s_c)});
          last_crossing_s = s_c;
        }
        skip = s_c + 1e-12;
      }
    }

    if (s_stop < std::numeric_limits<double>::infinity()) {
      result.traj.truncate(s_stop);
      result.status = stop_status;
      result.s_end = s_stop;
      return StepControl::Stop;
    }
    return StepControl::Continue;
  };

  const double reached =
      integrate_ode<4>(rhs, 0.0, y0, length, opt, result.traj, watcher);
  if (result.status == GeodesicStatus::Completed) result.s_end = reached;
  // Boundary hit exactly at the target level counts as a crossing.
  if (crossing_level && result.status == GeodesicStatus::HitBoundary &&
      std::abs(*crossing_level) < 1e-14) {
    if (result.crossings.empty() ||
        result.s_end - result.crossings.back().s > 1e-12)
      result.crossings.push_back(
          {result.s_end, result.traj.eval(1, result.s_end)});
  }
  return result;
}

ModelGeodesic make_geodesic(TraceResult&& tr, double nu) {
  ModelGeodesic g;
  g.clairaut = nu;
  g.status = tr.status;
  g.total_length = tr.s_end;
  g.trajectory = std::move(tr.traj);
  if (!g.trajectory.steps.empty()) {
    const auto& first = g.trajectory.steps.front();
    g.path.push_back({first.s0, first.y0[0], first.y0[1], first.y0[2],
                      first.y0[3]});
    for (const auto& st : g.trajectory.steps)
      g.path.push_back({st.s1, st.y1[0], st.y1[1], st.y1[2], st.y1[3]});
    const double xp_end = g.path.back().xp;
    g.x_sign = std::abs(xp_end) < 1e-12 ? 0 : (xp_end > 0 ? 1 : -1);
  }
  return g;
}

void check_domain(const WarpingFunction& w, ModelPoint p, const char* who) {
  if (p.x < 0.0 || p.x > w.domain_max()) {
    std::ostringstream msg;
    msg << who << ": point x=" << p.x << " outside [0, " << w.domain_max()
        << "]";
    throw std::domain_error(msg.str());
  }
}

// Cheap upper bound for d((x1,y), (x2,y+dy)): vertical leg, a parallel arc
// at the best level, vertical leg.
double distance_upper_bound(const WarpingFunction& w, double x1, double x2,
                            double ady) {
  const int n = 512;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double xm = w.domain_max() * i / n;
    const double v =
        std::abs(x1 - xm) + std::abs(x2 - xm) + w.evaluate(xm).m * ady;
    best = std::min(best, v);
  }
  return best;
}

ModelGeodesic trivial_geodesic(ModelPoint p, const WarpingFunction& w) {
  ModelGeodesic g;
  g.clairaut = 0.0;
  g.x_sign = 0;
  g.total_length = 0.0;
  g.status = GeodesicStatus::Completed;
  OdeStep<4> st;
  st.s0 = st.s1 = 0.0;
  const double m0 = w.evaluate(p.x).m;
  st.y0 = st.y1 = OdeState<4>{p.x, p.y, 1.0, 0.0};
  st.f0 = st.f1 = OdeState<4>{1.0, 0.0, 0.0, 0.0};
  g.trajectory.steps.push_back(st);
  g.path.push_back({0.0, p.x, p.y, 1.0, 0.0});
  (void)m0;
  return g;
}

}  // namespace

ModelPoint ModelGeodesic::start() const {
  if (path.empty()) return {};
  return {path.front().x, path.front().y};
}

ModelPoint ModelGeodesic::end() const {
  if (path.empty()) return {};
  return {path.back().x, path.back().y};
}

ModelPoint ModelGeodesic::point_at(double s) const {
  return {trajectory.eval(0, s), trajectory.eval(1, s)};
}

PathSample ModelGeodesic::sample_at(double s) const {
  const auto y = trajectory.eval(s);
  return {s, y[0], y[1], y[2], y[3]};
}

double ModelGeodesic::angle_at(double s, const WarpingFunction& w) const {
  const auto y = trajectory.eval(s);
  const double m = w.evaluate_extended(y[0]).m;
  return std::atan2(m * std::abs(y[3]), y[2]);
}

double ModelGeodesic::measured_clairaut_at(double s,
                                           const WarpingFunction& w) const {
  const auto y = trajectory.eval(s);
  const double m = w.evaluate_extended(y[0]).m;
  return m * m * std::abs(y[3]);
}

std::vector<double> ModelGeodesic::turning_points() const {
  std::vector<double> out;
  for (const auto& st : trajectory.steps) {
    if ((st.y0[2] < 0) != (st.y1[2] < 0)) {
      double s_t;
      if (step_crossing(st, 2, 0.0, st.s0, s_t)) out.push_back(s_t);
    }
  }
  return out;
}

double clairaut_constant(double x, double angle, const WarpingFunction& w) {
  const double m = w.evaluate(x).m;
  return m * std::abs(std::sin(angle));
}

ModelGeodesic integrate_geodesic(ModelPoint p, double angle, double length,
                                 const WarpingFunction& w) {
  check_domain(w, p, "integrate_geodesic");
  if (length <= 0.0) throw std::invalid_argument("geodesic length must be > 0");
  OdeOptions opt;
  opt.abs_tol = opt.rel_tol = 1e-12;
  TraceResult tr = trace_from(w, p, angle, length, opt, std::nullopt);
  if (tr.status == GeodesicStatus::WindowExit)
    throw std::domain_error("geodesic exits truncation window");
  const double nu = clairaut_constant(p.x, angle, w);
  return make_geodesic(std::move(tr), nu);
}

double length_between_parallels(double nu, double x1, double x2,
                                const WarpingFunction& w) {
  const double lo = std::min(x1, x2), hi = std::max(x1, x2);
  if (lo < 0.0 || hi > w.domain_max())
    throw std::domain_error("leg outside the truncation window");
  if (hi - lo < 1e-15) return 0.0;
  const int n = 1024;
  for (int i = 1; i < n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    if (w.evaluate(t).m <= nu)
      throw std::runtime_error("turning point inside leg");
  }
  auto f = [&](double t) {
    const double m = w.evaluate(t).m;
    const double sq = std::max(m * m - nu * nu, 1e-300);
    return m / std::sqrt(sq);
  };
  return integrate_adaptive(f, lo, hi, 1e-11);
}

double length_lower_bound(double nu, double t1, double t2,
                          const WarpingFunction& w) {
  if (t2 <= t1) return t2 - t1;
  if (nu <= 0.0) return t2 - t1;
  const int n = 1024;
  double min_m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i)
    min_m = std::min(min_m, w.evaluate(t1 + (t2 - t1) * i / n).m);
  if (nu >= min_m) return t2 - t1;
  auto f = [&](double t) {
    const double m = w.evaluate(t).m;
    const double sq = std::max(m * m - nu * nu, 1e-300);
    return 1.0 / (m * std::sqrt(sq));
  };
  return t2 - t1 + 0.5 * nu * nu * integrate_adaptive(f, t1, t2, 1e-11);
}

DistanceResult distance(ModelPoint p, ModelPoint q, const WarpingFunction& w,
                        const DistanceOptions& opt) {
  check_domain(w, p, "distance");
  check_domain(w, q, "distance");

  const double dy = q.y - p.y;
  const double ady = std::abs(dy);

  if (ady < 1e-13) {
    const double len = std::abs(q.x - p.x);
    if (len < 1e-15) return {0.0, trivial_geodesic(p, w)};
    ModelGeodesic g = integrate_geodesic(p, q.x >= p.x ? 0.0 : kPi, len, w);
    return {len, std::move(g)};
  }

  // Canonical reduced problem: shoot from the smaller-x endpoint toward +y.
  const bool swapped = p.x > q.x;
  const ModelPoint from = swapped ? q : p;
  const ModelPoint to = swapped ? p : q;
  const double x1 = from.x, x2 = to.x;

  const double cap = distance_upper_bound(w, x1, x2, ady) + 0.5;

  OdeOptions trial_opt;
  trial_opt.abs_tol = trial_opt.rel_tol = opt.trial_tol;

  detail::TraceFn trace = [&](double alpha, double length_cap) {
    TraceResult tr =
        trace_from(w, {x1, 0.0}, alpha, length_cap, trial_opt, x2);
    detail::TraceOutcome out;
    out.crossings = std::move(tr.crossings);
    out.hit_boundary = tr.status == GeodesicStatus::HitBoundary;
    out.hit_window = tr.status == GeodesicStatus::WindowExit;
    out.s_end = tr.s_end;
    return out;
  };

  const auto mp1 = w.evaluate(x1).mp;
  std::vector<detail::ReducedCandidate> cands;
  detail::ReducedBvpOptions bvp;
  for (int n_starts = opt.n_starts; n_starts <= 4 * opt.n_starts;
       n_starts *= 2) {
    bvp.n_starts = n_starts;
    cands = detail::solve_reduced_bvp(trace, detail::MatchTarget::Displacement,
                                      ady, cap, bvp);
    if (std::abs(x1 - x2) < 1e-12 && std::abs(mp1) < 1e-12) {
      detail::ReducedCandidate par;
      par.alpha = 0.5 * kPi;
      par.length = w.evaluate(x1).m * ady;
      par.displacement = ady;
      par.crossing_index = -1;  // parallel arc, not a level crossing
      cands.push_back(par);
    }
    if (!cands.empty()) break;
  }
  if (cands.empty()) {
    std::ostringstream msg;
    msg << "no geodesic found between (" << p.x << ", " << p.y << ") and ("
        << q.x << ", " << q.y << "): " << bvp.n_starts
        << " starts, cap=" << cap;
    throw std::runtime_error(msg.str());
  }

  const auto m1 = w.evaluate(x1).m;
  std::sort(cands.begin(), cands.end(),
            [&](const auto& a, const auto& b) {
              if (std::abs(a.length - b.length) > 1e-9)
                return a.length < b.length;
              return m1 * std::sin(a.alpha) < m1 * std::sin(b.alpha);
            });
  const detail::ReducedCandidate best = cands.front();
  int near_minimal = 0;
  {
    std::vector<double> seen;
    for (const auto& c : cands) {
      if (c.length > best.length + 1e-6) continue;
      bool dup = false;
      for (double a : seen)
        if (std::abs(c.alpha - a) < 1e-6) dup = true;
      if (!dup) {
        seen.push_back(c.alpha);
        ++near_minimal;
      }
    }
  }

  // Final construction at tight tolerance, oriented from p to q.
  OdeOptions final_opt;
  final_opt.abs_tol = final_opt.rel_tol = opt.final_tol;

  if (best.crossing_index < 0) {
    // Parallel arc between points of a geodesic level line.
    const double len = best.length;
    const double ang = dy > 0 ? 0.5 * kPi : -0.5 * kPi;
    TraceResult tr = trace_from(w, p, ang, len, final_opt, std::nullopt);
    ModelGeodesic g =
        make_geodesic(std::move(tr), clairaut_constant(p.x, ang, w));
    return {len, std::move(g), near_minimal};
  }

  // Polish the launch angle against the displacement residual at final
  // tolerance (secant; the trial-tolerance root is already ~1e-10 close).
  const int k = best.crossing_index;
  auto residual = [&](double alpha) -> double {
    TraceResult tr = trace_from(w, {x1, 0.0}, alpha, cap, final_opt, x2);
    if (k >= static_cast<int>(tr.crossings.size()))
      return std::numeric_limits<double>::quiet_NaN();
    return tr.crossings[k].y - ady;
  };
  double a0 = best.alpha;
  double r0 = residual(a0);
  double alpha_star = a0;
  if (!std::isnan(r0) && std::abs(r0) > 1e-11 * (1.0 + ady)) {
    double a1 = a0 + 1e-9;
    double r1 = residual(a1);
    for (int it = 0; it < 6 && !std::isnan(r1); ++it) {
      if (std::abs(r1 - r0) < 1e-300) break;
      const double a2 = a1 - r1 * (a1 - a0) / (r1 - r0);
      a0 = a1;
      r0 = r1;
      a1 = a2;
      r1 = residual(a1);
      if (!std::isnan(r1) && std::abs(r1) < 1e-12 * (1.0 + ady)) break;
    }
    if (!std::isnan(r1) && std::abs(r1) <= std::abs(r0)) alpha_star = a1;
    else alpha_star = a0;
  }

  TraceResult ft = trace_from(w, {x1, 0.0}, alpha_star, cap, final_opt, x2);
  if (k >= static_cast<int>(ft.crossings.size()))
    throw std::runtime_error("distance: candidate branch lost in polish");
  const double s_final = ft.crossings[k].s;

  // Shoot from the true p endpoint. If the canonical start was q, launch
  // from q, then reverse by relaunching from p with the reversed endpoint
  // direction.
  const double sign_from = (to.y >= from.y) ? 1.0 : -1.0;
  double launch_angle = 0.0;
  ModelPoint launch_point{};
  if (!swapped) {
    launch_point = p;
    launch_angle = dy > 0 ? alpha_star : -alpha_star;
  } else {
    // Trace from q toward p's side, read the arrival direction, reverse it.
    const double q_angle = (p.y >= q.y) ? alpha_star : -alpha_star;
    TraceResult back =
        trace_from(w, q, q_angle, s_final, final_opt, std::nullopt);
    const auto yend = back.traj.eval(back.s_end);
    const double m_end = w.evaluate_extended(yend[0]).m;
    launch_point = p;
    launch_angle = std::atan2(-m_end * yend[3], -yend[2]);
  }
  (void)sign_from;

  TraceResult final_tr =
      trace_from(w, launch_point, launch_angle, s_final, final_opt,
                 std::nullopt);
  ModelGeodesic g = make_geodesic(
      std::move(final_tr), clairaut_constant(launch_point.x, launch_angle, w));

  const ModelPoint reached = g.end();
  const double m_q = w.evaluate(q.x).m;
  const double end_err = std::abs(reached.x - q.x) +
                         m_q * std::abs(reached.y - q.y);
  if (end_err > 1e-6 * (1.0 + s_final)) {
    std::ostringstream msg;
    msg << "distance: endpoint miss " << end_err << " for (" << p.x << ","
        << p.y << ")->(" << q.x << "," << q.y << ")";
    throw std::runtime_error(msg.str());
  }
  return {s_final, std::move(g), near_minimal};
}

double distance_to_parallel(ModelPoint p, double c, double s,
                            const WarpingFunction& w) {
  return distance(p, ModelPoint{c, s}, w).distance;
}

std::optional<double> conjugate_point_search(const ModelGeodesic& g,
                                             const WarpingFunction& w) {
  if (g.total_length <= 0.0 || g.trajectory.empty()) return std::nullopt;
  const auto& geo = g.trajectory;
  auto rhs = [&](double s, const OdeState<2>& y) {
    const double x = geo.eval(0, s);
    const auto e = w.evaluate_extended(x);
    const double curvature = -e.mpp / e.m;
    return OdeState<2>{y[1], -curvature * y[0]};
  };
  OdeOptions opt;
  opt.abs_tol = opt.rel_tol = 1e-11;
  OdeTrajectory<2> jac;
  double zero_at = -1.0;
  integrate_ode<2>(rhs, 0.0, OdeState<2>{0.0, 1.0}, g.total_length, opt, jac,
                   [&](const OdeStep<2>& st) {
                     double s_z;
                     if (step_crossing(st, 0, 0.0, 1e-9, s_z)) {
                       zero_at = s_z;
                       return StepControl::Stop;
                     }
                     return StepControl::Continue;
                   });
  if (zero_at > 0.0) return zero_at;
  return std::nullopt;
}

void write_geodesic_csv(std::ostream& os, const ModelGeodesic& g,
                        const WarpingFunction& w) {
  os << "s,x,y,angle,nu\n";
  char buf[160];
  for (const auto& smp : g.path) {
    const double m = w.evaluate_extended(smp.x).m;
    const double angle = std::atan2(m * std::abs(smp.yp), smp.xp);
    const double nu = m * m * std::abs(smp.yp);
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g\n", smp.s,
                  smp.x, smp.y, angle, nu);
    os << buf;
  }
}

}  // namespace opentri
