#include "opentri/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "opentri/numerics.hpp"
#include "opentri/shooting.hpp"

namespace opentri {

namespace {

constexpr double kPi = 3.14159265358979323846;

double fiber_distance(const ManifoldPoint& p, const ManifoldPoint& q) {
  const double d0 = q.u[0] - p.u[0];
  const double d1 = q.u[1] - p.u[1];
  return std::hypot(d0, d1);
}

void check_point(const TestManifold& m, const ManifoldPoint& p,
                 const char* who) {
  if (p.t < 0.0 || p.t > m.t_max()) {
    std::ostringstream msg;
    msg << who << ": t=" << p.t << " outside [0, " << m.t_max() << "]";
    throw std::domain_error(msg.str());
  }
}

// Geodesic equations of dt^2 + f(t)^2 g_flat in (t, u1, u2, t', u1', u2'):
// t'' = f f' |u'|^2, u_i'' = -2 (f'/f) t' u_i'.
struct ManifoldRhs {
  const WarpingFunction* f;
  OdeState<6> operator()(double, const OdeState<6>& y) const {
    const auto e = f->evaluate_extended(y[0]);
    const double usq = y[4] * y[4] + y[5] * y[5];
    const double ratio = e.mp / e.m;
    return OdeState<6>{y[3],          y[4],
                       y[5],          e.m * e.mp * usq,
                       -2.0 * ratio * y[3] * y[4],
                       -2.0 * ratio * y[3] * y[5]};
  }
};

struct ManifoldTrace {
  OdeTrajectory<6> traj;
  GeodesicStatus status = GeodesicStatus::Completed;
  double s_end = 0.0;
  std::vector<detail::LevelCrossing> crossings;  // of a t-level; y = |du|
};

ManifoldTrace trace_manifold(const TestManifold& m, const ManifoldPoint& p,
                             const TangentVector& v, double length,
                             const OdeOptions& opt,
                             std::optional<double> crossing_level) {
  ManifoldTrace result;
  if (length <= 0.0) return result;

  const auto e0 = m.warping().evaluate_extended(p.t);
  const double speed = std::sqrt(
      v.vt * v.vt + e0.m * e0.m * (v.vu[0] * v.vu[0] + v.vu[1] * v.vu[1]));
  if (speed < 1e-14)
    throw std::invalid_argument("zero tangent vector");
  const OdeState<6> y0{p.t,          p.u[0],        p.u[1],
                       v.vt / speed, v.vu[0] / speed, v.vu[1] / speed};
  ManifoldRhs rhs{&m.warping()};

  const double t_hi = m.is_slab() ? m.slab_length() : m.warping().domain_max();
  const bool slab = m.is_slab();
  const double u0_0 = p.u[0], u0_1 = p.u[1];

  double last_crossing = -1.0;
  auto watcher = [&](const OdeStep<6>& st) {
    double s_stop = std::numeric_limits<double>::infinity();
    GeodesicStatus stop_status = GeodesicStatus::Completed;

    double s_b;
    if (step_crossing(st, 0, 0.0, st.s0 == 0.0 ? 1e-12 : st.s0, s_b)) {
      if (st.eval_derivative(0, s_b) < -1e-12 || st.y1[0] < -1e-14) {
        s_stop = s_b;
        stop_status = GeodesicStatus::HitBoundary;
      }
    }
    double s_t;
    if (step_crossing(st, 0, t_hi, st.s0 == 0.0 ? 1e-12 : st.s0, s_t)) {
      if (st.eval_derivative(0, s_t) > 1e-12 || st.y1[0] > t_hi + 1e-14) {
        if (s_t < s_stop) {
          s_stop = s_t;
          stop_status =
              slab ? GeodesicStatus::HitBoundary : GeodesicStatus::WindowExit;
        }
      }
    }

    if (crossing_level) {
      double skip = st.s0 == 0.0 ? 1e-12 : st.s0;
      double s_c;
      while (step_crossing(st, 0, *crossing_level, skip, s_c)) {
        if (s_c > s_stop) break;
        if (s_c - last_crossing > 1e-12) {
          const double du0 = st.eval(1, s_c) - u0_0;
          const double du1 = st.eval(2, s_c) - u0_1;
          result.crossings.push_back({s_c, std::hypot(du0, du1)});
          last_crossing = s_c;
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
      integrate_ode<6>(rhs, 0.0, y0, length, opt, result.traj, watcher);
  if (result.status == GeodesicStatus::Completed) result.s_end = reached;
  if (crossing_level && result.status == GeodesicStatus::HitBoundary) {
    const double lvl = *crossing_level;
    if (std::abs(lvl) < 1e-14 || (slab && std::abs(lvl - t_hi) < 1e-14)) {
      const double t_end = result.traj.eval(0, result.s_end);
      if (std::abs(t_end - lvl) < 1e-9 &&
          (result.crossings.empty() ||
           result.s_end - result.crossings.back().s > 1e-12)) {
        const double du0 = result.traj.eval(1, result.s_end) - u0_0;
        const double du1 = result.traj.eval(2, result.s_end) - u0_1;
        result.crossings.push_back({result.s_end, std::hypot(du0, du1)});
      }
    }
  }
  return result;
}

ManifoldGeodesic make_manifold_geodesic(ManifoldTrace&& tr) {
  ManifoldGeodesic g;
  g.status = tr.status;
  g.total_length = tr.s_end;
  g.trajectory = std::move(tr.traj);
  if (!g.trajectory.steps.empty()) {
    const auto& first = g.trajectory.steps.front();
    g.path.push_back({first.s0,
                      first.y0[0],
                      {first.y0[1], first.y0[2]},
                      first.y0[3],
                      {first.y0[4], first.y0[5]}});
    for (const auto& st : g.trajectory.steps)
      g.path.push_back(
          {st.s1, st.y1[0], {st.y1[1], st.y1[2]}, st.y1[3], {st.y1[4], st.y1[5]}});
  }
  return g;
}

}  // namespace

TestManifold::TestManifold(int dim, WarpingFunction f,
                           std::optional<WarpingFunction> model,
                           std::optional<double> slab_length)
    : dim_(dim),
      fiber_(dim == 2 ? FiberKind::Line : FiberKind::Plane),
      f_(std::move(f)),
      model_(std::move(model)),
      slab_length_(slab_length) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("test manifolds have dim 2 or 3");
  const auto e0 = f_.evaluate(0.0);
  if (std::abs(e0.m - 1.0) > 1e-10 || std::abs(e0.mp) > 1e-10)
    throw std::invalid_argument(
        "manifold warping must satisfy f(0)=1, f'(0)=0");
  shape_eigenvalue_ = -e0.mp / e0.m;
  if (shape_eigenvalue_ < 0.0)
    throw std::invalid_argument("boundary is not convex: f'(0) > 0");
  if (shape_eigenvalue_ < 1e-12) shape_eigenvalue_ = 0.0;
}

TestManifold TestManifold::warped(int dim, const WarpingFunction& f,
                                  std::optional<WarpingFunction> model) {
  return TestManifold(dim, f, std::move(model), std::nullopt);
}

TestManifold TestManifold::slab(int dim, double length,
                                std::optional<WarpingFunction> model) {
  if (length <= 0.0) throw std::invalid_argument("slab length must be > 0");
  return TestManifold(dim, WarpingFunction::euclidean(std::max(20.0, length)),
                      std::move(model), length);
}

ManifoldPoint ManifoldGeodesic::start() const {
  if (path.empty()) return {};
  return {path.front().t, path.front().u};
}

ManifoldPoint ManifoldGeodesic::end() const {
  if (path.empty()) return {};
  return {path.back().t, path.back().u};
}

ManifoldPoint ManifoldGeodesic::point_at(double s) const {
  const auto y = trajectory.eval(s);
  return {y[0], {y[1], y[2]}};
}

std::array<double, 2> ManifoldGeodesic::momenta_at(double s,
                                                   const TestManifold& m) const {
  const auto y = trajectory.eval(s);
  const double f = m.warping().evaluate_extended(y[0]).m;
  return {f * f * y[4], f * f * y[5]};
}

double ManifoldGeodesic::speed_defect_at(double s,
                                         const TestManifold& m) const {
  const auto y = trajectory.eval(s);
  const double f = m.warping().evaluate_extended(y[0]).m;
  return std::abs(y[3] * y[3] + f * f * (y[4] * y[4] + y[5] * y[5]) - 1.0);
}

ManifoldGeodesic integrate_manifold_geodesic(const TestManifold& m,
                                             ManifoldPoint p, TangentVector v,
                                             double length) {
  check_point(m, p, "integrate_manifold_geodesic");
  if (length <= 0.0) throw std::invalid_argument("geodesic length must be > 0");
  if (m.dim() == 2 && std::abs(v.vu[1]) > 1e-14)
    throw std::invalid_argument("dim-2 manifolds have a single fiber direction");
  OdeOptions opt;
  opt.abs_tol = opt.rel_tol = 1e-12;
  ManifoldTrace tr = trace_manifold(m, p, v, length, opt, std::nullopt);
  if (tr.status == GeodesicStatus::WindowExit)
    throw std::domain_error("geodesic exits truncation window");
  return make_manifold_geodesic(std::move(tr));
}

BoundarySegmentInfo boundary_segment(const TestManifold& m, ManifoldPoint p) {
  check_point(m, p, "boundary_segment");
  BoundarySegmentInfo info;
  if (m.is_slab() && p.t > 0.5 * m.slab_length()) {
    info.component = 1;
    info.length = m.slab_length() - p.t;
    info.foot = {m.slab_length(), p.u};
  } else {
    info.component = 0;
    info.length = p.t;
    info.foot = {0.0, p.u};
  }
  return info;
}

ManifoldDistanceResult manifold_distance(const TestManifold& m,
                                         ManifoldPoint p, ManifoldPoint q) {
  check_point(m, p, "manifold_distance");
  check_point(m, q, "manifold_distance");

  const double du = fiber_distance(p, q);
  std::array<double, 2> dir{1.0, 0.0};
  if (du > 0.0)
    dir = {(q.u[0] - p.u[0]) / du, (q.u[1] - p.u[1]) / du};

  if (du < 1e-13) {
    const double len = std::abs(q.t - p.t);
    if (len < 1e-15) {
      ManifoldGeodesic g;
      g.total_length = 0.0;
      g.path.push_back({0.0, p.t, p.u, 1.0, {0.0, 0.0}});
      OdeStep<6> st;
      st.s0 = st.s1 = 0.0;
      st.y0 = st.y1 = OdeState<6>{p.t, p.u[0], p.u[1], 1.0, 0.0, 0.0};
      st.f0 = st.f1 = OdeState<6>{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
      g.trajectory.steps.push_back(st);
      return {0.0, std::move(g)};
    }
    TangentVector v{q.t >= p.t ? 1.0 : -1.0, {0.0, 0.0}};
    ManifoldGeodesic g = integrate_manifold_geodesic(m, p, v, len);
    return {len, std::move(g)};
  }

  const bool swapped = p.t > q.t;
  const ManifoldPoint from = swapped ? q : p;
  const ManifoldPoint to = swapped ? p : q;
  const double t1 = from.t, t2 = to.t;
  const WarpingFunction& f = m.warping();

  // Level/arc/level upper bound for the trial length cap.
  double cap = std::numeric_limits<double>::infinity();
  {
    const int n = 512;
    for (int i = 0; i <= n; ++i) {
      const double tm = m.t_max() * i / n;
      cap = std::min(cap, std::abs(t1 - tm) + std::abs(t2 - tm) +
                              f.evaluate(tm).m * du);
    }
    cap += 0.5;
  }

  OdeOptions trial_opt;
  trial_opt.abs_tol = trial_opt.rel_tol = 1e-10;
  const std::array<double, 2> e_u = swapped
                                        ? std::array<double, 2>{-dir[0], -dir[1]}
                                        : dir;

  auto launch = [&](const ManifoldPoint& base, double alpha,
                    double sign_u) -> TangentVector {
    const double fm = f.evaluate_extended(base.t).m;
    return TangentVector{std::cos(alpha),
                         {sign_u * std::sin(alpha) / fm * e_u[0],
                          sign_u * std::sin(alpha) / fm * e_u[1]}};
  };

  detail::TraceFn trace = [&](double alpha, double length_cap) {
    ManifoldTrace tr = trace_manifold(m, from, launch(from, alpha, 1.0),
                                      length_cap, trial_opt, t2);
    detail::TraceOutcome out;
    out.crossings = std::move(tr.crossings);
    out.hit_boundary = tr.status == GeodesicStatus::HitBoundary;
    out.hit_window = tr.status == GeodesicStatus::WindowExit;
    out.s_end = tr.s_end;
    return out;
  };

  std::vector<detail::ReducedCandidate> cands;
  detail::ReducedBvpOptions bvp;
  const double fp1 = f.evaluate(t1).mp;
  for (int n_starts = 64; n_starts <= 256; n_starts *= 2) {
    bvp.n_starts = n_starts;
    cands = detail::solve_reduced_bvp(trace, detail::MatchTarget::Displacement,
                                      du, cap, bvp);
    if (std::abs(t1 - t2) < 1e-12 && std::abs(fp1) < 1e-12) {
      detail::ReducedCandidate par;
      par.alpha = 0.5 * kPi;
      par.length = f.evaluate(t1).m * du;
      par.displacement = du;
      par.crossing_index = -1;
      cands.push_back(par);
    }
    if (!cands.empty()) break;
  }
  if (cands.empty()) {
    std::ostringstream msg;
    msg << "manifold_distance: no geodesic found (t1=" << t1 << ", t2=" << t2
        << ", du=" << du << ")";
    throw std::runtime_error(msg.str());
  }

  const double f1 = f.evaluate(t1).m;
  std::sort(cands.begin(), cands.end(), [&](const auto& a, const auto& b) {
    if (std::abs(a.length - b.length) > 1e-9) return a.length < b.length;
    return f1 * std::sin(a.alpha) < f1 * std::sin(b.alpha);
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

  OdeOptions final_opt;
  final_opt.abs_tol = final_opt.rel_tol = 1e-12;

  double s_final = best.length;
  double alpha_star = best.alpha;
  if (best.crossing_index >= 0) {
    const int k = best.crossing_index;
    auto residual = [&](double alpha) -> double {
      ManifoldTrace tr = trace_manifold(m, from, launch(from, alpha, 1.0), cap,
                                        final_opt, t2);
      if (k >= static_cast<int>(tr.crossings.size()))
        return std::numeric_limits<double>::quiet_NaN();
      s_final = tr.crossings[k].s;
      return tr.crossings[k].y - du;
    };
    double a0 = alpha_star;
    double r0 = residual(a0);
    if (!std::isnan(r0) && std::abs(r0) > 1e-11 * (1.0 + du)) {
      double a1 = a0 + 1e-9;
      double r1 = residual(a1);
      double best_a = a0, best_r = std::abs(r0);
      for (int it = 0; it < 6 && !std::isnan(r1); ++it) {
        if (std::abs(r1) < best_r) {
          best_r = std::abs(r1);
          best_a = a1;
        }
        if (std::abs(r1) < 1e-12 * (1.0 + du)) break;
        if (std::abs(r1 - r0) < 1e-300) break;
        const double a2 = a1 - r1 * (a1 - a0) / (r1 - r0);
        a0 = a1;
        r0 = r1;
        a1 = a2;
        r1 = residual(a1);
      }
      alpha_star = best_a;
      residual(alpha_star);  // refresh s_final
    }
  }

  // Construct oriented p -> q.
  ManifoldGeodesic g;
  if (best.crossing_index < 0) {
    TangentVector v{0.0, {dir[0] / f1, dir[1] / f1}};
    g = integrate_manifold_geodesic(m, p, v, s_final);
  } else if (!swapped) {
    ManifoldTrace tr = trace_manifold(m, p, launch(p, alpha_star, 1.0),
                                      s_final, final_opt, std::nullopt);
    g = make_manifold_geodesic(std::move(tr));
  } else {
    ManifoldTrace back = trace_manifold(m, q, launch(q, alpha_star, 1.0),
                                        s_final, final_opt, std::nullopt);
    const auto yend = back.traj.eval(back.s_end);
    TangentVector v{-yend[3], {-yend[4], -yend[5]}};
    ManifoldTrace tr =
        trace_manifold(m, p, v, s_final, final_opt, std::nullopt);
    g = make_manifold_geodesic(std::move(tr));
  }

  const ManifoldPoint reach = g.end();
  const double err = std::abs(reach.t - q.t) + fiber_distance(reach, q);
  if (err > 1e-6 * (1.0 + s_final)) {
    std::ostringstream msg;
    msg << "manifold_distance: endpoint miss " << err;
    throw std::runtime_error(msg.str());
  }
  return {s_final, std::move(g), near_minimal};
}

ManifoldOpenTriangle open_triangle(const TestManifold& m, ManifoldPoint p,
                                   ManifoldPoint q) {
  check_point(m, p, "open_triangle");
  check_point(m, q, "open_triangle");
  if (p.t <= 0.0 || q.t <= 0.0 || p.t >= m.t_max() || q.t >= m.t_max())
    throw std::invalid_argument("open triangle vertices must be interior");

  const BoundarySegmentInfo fp = boundary_segment(m, p);
  const BoundarySegmentInfo fq = boundary_segment(m, q);
  if (fp.component != fq.component)
    throw std::invalid_argument(
        "open triangle feet lie on different boundary components");

  ManifoldDistanceResult dr = manifold_distance(m, p, q);
  if (dr.distance <= 0.0)
    throw std::invalid_argument("open triangle needs p != q");

  ManifoldOpenTriangle t;
  t.p = p;
  t.q = q;
  t.a = fp.length;
  t.c = fq.length;
  t.b = dr.distance;
  t.foot_gap = fiber_distance(fp.foot, fq.foot);

  // Angle against the reversed boundary segment: the segment's velocity at p
  // is +d/dt for component 0 and -d/dt for component 1.
  const double tp0 = dr.geodesic.trajectory.eval(3, 0.0);
  const double tpL = dr.geodesic.trajectory.eval(3, dr.geodesic.total_length);
  const double sgn = fp.component == 0 ? 1.0 : -1.0;
  double angle_p = std::acos(std::clamp(-sgn * tp0, -1.0, 1.0));
  double angle_q = std::acos(std::clamp(sgn * tpL, -1.0, 1.0));
  // Snap near-degenerate angles so degenerate triangles are detectable.
  auto snap = [](double a) {
    if (a < 1e-9) return 0.0;
    if (a > kPi - 1e-9) return kPi;
    return a;
  };
  t.angle_p = snap(angle_p);
  t.angle_q = snap(angle_q);
  t.opposite_side = std::move(dr.geodesic);
  return t;
}

CurvatureCertificate curvature_bound_certificate(const TestManifold& m,
                                                 double horizon, int samples) {
  if (!m.model())
    throw std::invalid_argument("curvature certificate needs an attached model");
  const WarpingFunction& model = *m.model();
  const double hi = std::min(horizon, std::min(m.t_max(), model.domain_max()));
  CurvatureCertificate cert;
  cert.horizon = hi;
  cert.samples = samples;
  double min_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) {
    const double t = hi * i / samples;
    const auto e = m.warping().evaluate(t);
    const double radial = -e.mpp / e.m;
    const double g = model.radial_curvature(t);
    min_slack = std::min(min_slack, radial - g);
  }
  cert.min_slack = min_slack;
  cert.pass = min_slack >= -1e-9;
  return cert;
}

double variational_length(const TestManifold& m, ManifoldPoint p, double theta,
                          double s) {
  check_point(m, p, "variational_length");
  if (s <= 0.0) throw std::invalid_argument("variation step must be positive");
  const double fm = m.warping().evaluate(p.t).m;
  TangentVector v{std::cos(theta), {std::sin(theta) / fm, 0.0}};
  OdeOptions opt;
  opt.abs_tol = opt.rel_tol = 1e-12;
  ManifoldTrace tr = trace_manifold(m, p, v, s, opt, std::nullopt);
  if (tr.status != GeodesicStatus::Completed)
    throw std::invalid_argument(
        "variation step too large: geodesic left the manifold");
  const double t_end = tr.traj.eval(0, tr.s_end);
  if (m.is_slab()) return std::min(t_end, m.slab_length() - t_end);
  return t_end;
}

}  // namespace opentri
