#ifndef OPENTRI_SHOOTING_HPP
#define OPENTRI_SHOOTING_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "opentri/numerics.hpp"

// Reduced boundary-value solver shared by the model-surface and manifold
// distance solvers. Both reduce, by fiber translation invariance, to
// shooting a geodesic from (x_start, 0) toward +y and matching either the
// displacement or the arclength at the k-th crossing of a target level.
// Multi-start over the launch angle brackets each crossing branch; Brent
// refines within a bracket.

namespace opentri::detail {

struct LevelCrossing {
  double s;  // arclength at the crossing
  double y;  // fiber displacement at the crossing
};

struct TraceOutcome {
  std::vector<LevelCrossing> crossings;
  bool hit_boundary = false;
  bool hit_window = false;
  double s_end = 0.0;
};

using TraceFn = std::function<TraceOutcome(double alpha, double length_cap)>;

struct ReducedCandidate {
  double alpha = 0.0;
  double length = 0.0;
  double displacement = 0.0;
  int crossing_index = 0;
};

struct ReducedBvpOptions {
  int n_starts = 64;
  int max_crossings = 6;
  double root_xtol = 5e-14;
};

enum class MatchTarget { Displacement, Length };

inline std::vector<ReducedCandidate> solve_reduced_bvp(
    const TraceFn& trace, MatchTarget mode, double target, double length_cap,
    const ReducedBvpOptions& opt) {
  const double pi = 3.14159265358979323846;
  std::vector<double> alphas(opt.n_starts);
  std::vector<TraceOutcome> outcomes(opt.n_starts);
  for (int i = 0; i < opt.n_starts; ++i) {
    alphas[i] = pi * (i + 0.5) / opt.n_starts;
    outcomes[i] = trace(alphas[i], length_cap);
  }

  auto value = [mode](const TraceOutcome& out, int k) -> double {
    if (k >= static_cast<int>(out.crossings.size()))
      return std::numeric_limits<double>::quiet_NaN();
    return mode == MatchTarget::Displacement ? out.crossings[k].y
                                             : out.crossings[k].s;
  };

  std::vector<ReducedCandidate> found;
  auto record = [&](double alpha, const TraceOutcome& out, int k) {
    if (k >= static_cast<int>(out.crossings.size())) return;
    ReducedCandidate c;
    c.alpha = alpha;
    c.length = out.crossings[k].s;
    c.displacement = out.crossings[k].y;
    c.crossing_index = k;
    for (const auto& prev : found)
      if (std::abs(prev.alpha - alpha) < 1e-10 && prev.crossing_index == k)
        return;
    found.push_back(c);
  };

  for (int k = 0; k < opt.max_crossings; ++k) {
    for (int i = 0; i + 1 < opt.n_starts; ++i) {
      const double v0 = value(outcomes[i], k);
      const double v1 = value(outcomes[i + 1], k);
      if (std::isnan(v0) || std::isnan(v1)) continue;
      const double r0 = v0 - target;
      const double r1 = v1 - target;
      if (std::abs(r0) < 1e-12) {
        record(alphas[i], outcomes[i], k);
        continue;
      }
      if (std::abs(r1) < 1e-12) continue;  // caught by the next bracket
      if ((r0 < 0) == (r1 < 0)) continue;

      TraceOutcome last;
      auto residual = [&](double a) {
        last = trace(a, length_cap);
        const double v = value(last, k);
        // Branch death inside the bracket: push the root finder back toward
        // the side that still has the crossing.
        if (std::isnan(v)) return (r0 < 0) ? std::abs(r0) : -std::abs(r0);
        return v - target;
      };
      try {
        const double a_root = brent_root(residual, alphas[i], alphas[i + 1],
                                         r0, r1, opt.root_xtol);
        const TraceOutcome out = trace(a_root, length_cap);
        const double v = value(out, k);
        if (!std::isnan(v) && std::abs(v - target) < 1e-6 * (1.0 + target))
          record(a_root, out, k);
      } catch (const std::exception&) {
        // Unbracketable after branch death; skip this pair.
      }
    }
  }
  return found;
}

}  // namespace opentri::detail

#endif
