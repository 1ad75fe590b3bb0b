#include "opentri/triangle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "opentri/numerics.hpp"
#include "opentri/shooting.hpp"

namespace opentri {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamped_acos(double v) { return std::acos(std::clamp(v, -1.0, 1.0)); }

void validate_sides(const TriangleSides& s) {
  if (!(s.a > 0.0) || !(s.c > 0.0))
    throw std::invalid_argument(
        "triangle vertices must be interior points (a, c > 0)");
  if (!(s.b > 0.0)) throw std::invalid_argument("opposite side must have b > 0");
  if (s.b < std::abs(s.a - s.c) - 1e-9)
    throw std::invalid_argument("sides not in T: b < |a - c|");
}

ModelOpenTriangle degenerate_triangle(const TriangleSides& s,
                                      const WarpingFunction& w) {
  ModelOpenTriangle t;
  t.sides = s;
  t.degenerate = true;
  t.p = {s.a, 0.0};
  t.q = {s.c, 0.0};
  t.foot_y1 = t.foot_y2 = 0.0;
  t.base_gap = 0.0;
  const bool up = s.a < s.c;
  t.angle_p = up ? kPi : 0.0;
  t.angle_q = up ? 0.0 : kPi;
  t.opposite_side =
      integrate_geodesic(t.p, up ? 0.0 : kPi, std::abs(s.a - s.c), w);
  return t;
}

struct RealizedSide {
  double theta = 0.0;
  ModelGeodesic geodesic;  // oriented p=(a,0) -> q=(c,theta)
};

// Find the triangle's opposite side: geodesics of length b between the
// levels, largest displacement wins.
RealizedSide realize_opposite_side(const TriangleSides& sides,
                                   const WarpingFunction& w) {
  const double a = sides.a, b = sides.b, c = sides.c;
  const bool swapped = a > c;
  const double x1 = std::min(a, c);
  const double x2 = std::max(a, c);
  if (x2 > w.domain_max())
    throw std::domain_error("triangle vertex outside the truncation window");

  const double cap = b * (1.0 + 1e-9) + 0.25;

  bool saw_window_exit = false;
  detail::TraceFn trace = [&](double alpha, double length_cap) {
    detail::TraceOutcome out;
    ModelGeodesic g;
    try {
      g = integrate_geodesic({x1, 0.0}, alpha, length_cap, w);
    } catch (const std::domain_error&) {
      out.hit_window = true;
      saw_window_exit = true;
      return out;
    }
    // collect crossings of x = x2 from the dense trajectory
    double last = -1.0;
    for (const auto& st : g.trajectory.steps) {
      double skip = st.s0 == 0.0 ? 1e-12 : st.s0;
      double s_c;
      while (step_crossing(st, 0, x2, skip, s_c)) {
        if (s_c - last > 1e-12) {
          out.crossings.push_back({s_c, st.eval(1, s_c)});
          last = s_c;
        }
        skip = s_c + 1e-12;
      }
    }
    out.hit_boundary = g.status == GeodesicStatus::HitBoundary;
    out.s_end = g.total_length;
    return out;
  };

  std::vector<detail::ReducedCandidate> cands;
  detail::ReducedBvpOptions bvp;
  for (int n_starts = 64; n_starts <= 256; n_starts *= 2) {
    bvp.n_starts = n_starts;
    cands = detail::solve_reduced_bvp(trace, detail::MatchTarget::Length, b,
                                      cap, bvp);
    const double mp1 = w.evaluate(x1).mp;
    if (std::abs(x1 - x2) < 1e-12 && std::abs(mp1) < 1e-12) {
      detail::ReducedCandidate par;
      par.alpha = 0.5 * kPi;
      par.length = b;
      par.displacement = b / w.evaluate(x1).m;
      par.crossing_index = -1;
      cands.push_back(par);
    }
    if (!cands.empty()) break;
  }
  if (cands.empty()) {
    std::ostringstream msg;
    if (saw_window_exit)
      msg << "unrealizable in window: (a,b,c)=(" << a << "," << b << "," << c
          << ")";
    else
      msg << "no realizing geodesic found for (a,b,c)=(" << a << "," << b
          << "," << c << ")";
    throw std::runtime_error(msg.str());
  }

  std::sort(cands.begin(), cands.end(), [](const auto& u, const auto& v) {
    return u.displacement > v.displacement;
  });
  const detail::ReducedCandidate best = cands.front();

  RealizedSide out;
  if (best.crossing_index < 0) {
    // Parallel arc (a == c on a level with m' == 0).
    out.theta = best.displacement;
    out.geodesic = integrate_geodesic({a, 0.0}, 0.5 * kPi, b, w);
    return out;
  }

  // Polish the launch angle on the length residual.
  const int k = best.crossing_index;
  auto crossing_at = [&](double alpha, detail::LevelCrossing& cr) -> bool {
    detail::TraceOutcome t = trace(alpha, cap);
    if (k >= static_cast<int>(t.crossings.size())) return false;
    cr = t.crossings[k];
    return true;
  };
  double alpha_star = best.alpha;
  detail::LevelCrossing cr{};
  if (!crossing_at(alpha_star, cr))
    throw std::runtime_error("triangle realization: branch lost in polish");
  {
    double a0 = alpha_star, r0 = cr.s - b;
    if (std::abs(r0) > 1e-12 * (1.0 + b)) {
      double a1 = a0 + 1e-9;
      detail::LevelCrossing c1{};
      if (crossing_at(a1, c1)) {
        double r1 = c1.s - b;
        for (int it = 0; it < 6; ++it) {
          if (std::abs(r1 - r0) < 1e-300) break;
          const double a2 = a1 - r1 * (a1 - a0) / (r1 - r0);
          a0 = a1;
          r0 = r1;
          a1 = a2;
          if (!crossing_at(a1, c1)) break;
          r1 = c1.s - b;
          if (std::abs(r1) < 1e-13 * (1.0 + b)) break;
        }
        if (std::abs(r1) <= std::abs(r0) && crossing_at(a1, c1)) {
          alpha_star = a1;
          cr = c1;
        }
      }
    }
  }
  out.theta = cr.y;

  // Build the side oriented p=(a,0) -> q=(c,theta). The canonical trace runs
  // from the lower level; if a > c it ends at the p side and must be
  // reversed and reflected to the normalized placement.
  if (!swapped) {
    ModelGeodesic g = integrate_geodesic({a, 0.0}, alpha_star, cr.s, w);
    out.geodesic = std::move(g);
  } else {
    ModelGeodesic fwd = integrate_geodesic({x1, 0.0}, alpha_star, cr.s, w);
    const auto yend = fwd.trajectory.eval(fwd.total_length);
    const double m_end = w.evaluate_extended(yend[0]).m;
    // Reverse (-v) then reflect y (y -> theta - y): velocity (vx, vy) at the
    // arrival maps to launch direction (-vx, +vy) at p = (a, 0).
    const double launch = std::atan2(m_end * yend[3], -yend[2]);
    out.geodesic = integrate_geodesic({a, 0.0}, launch, cr.s, w);
  }

  const ModelPoint reach = out.geodesic.end();
  const double err =
      std::abs(reach.x - c) + std::abs(reach.y - out.theta);
  if (err > 1e-6 * (1.0 + b)) {
    std::ostringstream msg;
    msg << "triangle realization endpoint miss " << err << " for (a,b,c)=("
        << a << "," << b << "," << c << ")";
    throw std::runtime_error(msg.str());
  }
  return out;
}

}  // namespace

ModelOpenTriangle build_model_triangle(const TriangleSides& sides,
                                       const WarpingFunction& w) {
  validate_sides(sides);
  if (sides.b - std::abs(sides.a - sides.c) <= 1e-12)
    return degenerate_triangle(sides, w);

  RealizedSide side = realize_opposite_side(sides, w);
  ModelOpenTriangle t;
  t.sides = sides;
  t.degenerate = false;
  t.p = {sides.a, 0.0};
  t.q = {sides.c, side.theta};
  t.foot_y1 = 0.0;
  t.foot_y2 = side.theta;
  t.base_gap = side.theta;
  const auto& path = side.geodesic;
  const double xp0 = path.trajectory.eval(2, 0.0);
  const double xpL = path.trajectory.eval(2, path.total_length);
  t.angle_p = clamped_acos(-xp0);
  t.angle_q = clamped_acos(xpL);
  t.opposite_side = std::move(side.geodesic);
  return t;
}

double theta(const TriangleSides& sides, const WarpingFunction& w) {
  return build_model_triangle(sides, w).base_gap;
}

double theta_lipschitz_probe(const TriangleSides& sides,
                             const WarpingFunction& w, double h) {
  if (h <= 0.0) throw std::invalid_argument("probe step must be positive");
  const double base = theta(sides, w);
  double worst = 0.0;
  const std::array<std::array<double, 3>, 6> deltas{{{+1, 0, 0},
                                                     {-1, 0, 0},
                                                     {0, +1, 0},
                                                     {0, -1, 0},
                                                     {0, 0, +1},
                                                     {0, 0, -1}}};
  for (const auto& d : deltas) {
    TriangleSides s{sides.a + d[0] * h, sides.b + d[1] * h, sides.c + d[2] * h};
    if (!(s.a > 0.0) || !(s.c > 0.0) || s.b <= std::abs(s.a - s.c))
      throw std::invalid_argument("perturbed sides leave T");
    worst = std::max(worst, std::abs(theta(s, w) - base) / h);
  }
  return worst;
}

ModelOpenTriangle glue_triangles(const ModelOpenTriangle& t1,
                                 const ModelOpenTriangle& t2,
                                 const WarpingFunction& w) {
  if (std::abs(t1.sides.c - t2.sides.a) > 1e-7)
    throw std::invalid_argument(
        "glue: shared side mismatch (d(bd, q1) != d(bd, p2))");
  if (t1.angle_q + t2.angle_p > kPi + 1e-7)
    throw std::invalid_argument("glue: interface angle sum exceeds pi");

  ModelOpenTriangle glued = build_model_triangle(
      {t1.sides.a, t1.sides.b + t2.sides.b, t2.sides.c}, w);
  if (t1.angle_p < glued.angle_p - 1e-6 || t2.angle_q < glued.angle_q - 1e-6) {
    std::ostringstream msg;
    msg << "hypothesis regime exceeded: glued angles increased ("
        << t1.angle_p << " vs " << glued.angle_p << ", " << t2.angle_q
        << " vs " << glued.angle_q << ")";
    throw std::runtime_error(msg.str());
  }
  return glued;
}

namespace {

struct Segment {
  double length = 0.0;
  ModelGeodesic geodesic;
};

// x-coordinate where the geodesic (with monotone y) crosses the line y = yl.
bool geodesic_x_at_y(const ModelGeodesic& g, double yl, double& x_out) {
  for (const auto& st : g.trajectory.steps) {
    double s_c;
    if (step_crossing(st, 1, yl, st.s0 - 1.0, s_c)) {
      x_out = st.eval(0, s_c);
      return true;
    }
  }
  return false;
}

}  // namespace

GeneralizedOpenTriangle build_generalized_triangle(
    const std::vector<TriangleSides>& pieces, const WarpingFunction& w) {
  if (pieces.empty())
    throw std::invalid_argument("generalized triangle needs at least one piece");

  GeneralizedOpenTriangle out;
  out.chain.reserve(pieces.size());
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    if (std::abs(pieces[i].c - pieces[i + 1].a) > 1e-7)
      throw std::invalid_argument("interface mismatch in chain");
  }
  double y_acc = 0.0;
  out.vertices.push_back({pieces.front().a, 0.0});
  for (const auto& s : pieces) {
    ModelOpenTriangle t = build_model_triangle(s, w);
    y_acc += t.base_gap;
    out.vertices.push_back({s.c, y_acc});
    out.chain.push_back(std::move(t));
    out.chain_length += s.b;
  }
  for (std::size_t i = 0; i + 1 < out.chain.size(); ++i) {
    if (out.chain[i].angle_q + out.chain[i + 1].angle_p > kPi + 1e-7)
      throw std::invalid_argument("angle-sum violation at chain interface");
  }

  const int k = static_cast<int>(out.vertices.size()) - 1;

  std::map<std::pair<int, int>, Segment> seg_cache;
  auto segment = [&](int i, int j) -> const Segment& {
    auto key = std::make_pair(i, j);
    auto it = seg_cache.find(key);
    if (it == seg_cache.end()) {
      DistanceResult dr = distance(
          {out.vertices[i].x, out.vertices[i].y},
          {out.vertices[j].x, out.vertices[j].y}, w);
      Segment s;
      s.length = dr.distance;
      s.geodesic = std::move(dr.geodesic);
      it = seg_cache.emplace(key, std::move(s)).first;
    }
    return it->second;
  };

  auto feasible = [&](int i, int j) {
    const Segment& s = segment(i, j);
    for (int l = i + 1; l < j; ++l) {
      double xc;
      if (!geodesic_x_at_y(s.geodesic, out.vertices[l].y, xc)) continue;
      if (xc > out.vertices[l].x + 1e-9) return false;
    }
    return true;
  };

  std::vector<int> contacts(k + 1);
  for (int i = 0; i <= k; ++i) contacts[i] = i;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t idx = 1; idx + 1 < contacts.size(); ++idx) {
      const int a = contacts[idx - 1], v = contacts[idx],
                b = contacts[idx + 1];
      if (!feasible(a, b)) continue;
      const double via = segment(a, v).length + segment(v, b).length;
      if (segment(a, b).length < via - 1e-12) {
        contacts.erase(contacts.begin() + idx);
        improved = true;
        break;
      }
    }
  }

  out.shortcut_length = 0.0;
  for (std::size_t idx = 0; idx + 1 < contacts.size(); ++idx)
    out.shortcut_length += segment(contacts[idx], contacts[idx + 1]).length;
  out.contacts.assign(contacts.begin() + 1, contacts.end() - 1);

  out.endpoint_distance = segment(0, k).length;

  const Segment& first = segment(contacts[0], contacts[1]);
  const Segment& last = segment(contacts[contacts.size() - 2],
                                contacts[contacts.size() - 1]);
  out.angle_p = clamped_acos(-first.geodesic.trajectory.eval(2, 0.0));
  out.angle_q = clamped_acos(
      last.geodesic.trajectory.eval(2, last.geodesic.total_length));

  if (out.endpoint_distance > out.shortcut_length + 1e-7 ||
      out.shortcut_length > out.chain_length + 1e-7)
    throw std::runtime_error(
        "generalized triangle inequality chain violated numerically");
  return out;
}

}  // namespace opentri
