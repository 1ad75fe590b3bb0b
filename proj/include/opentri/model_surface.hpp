#ifndef OPENTRI_MODEL_SURFACE_HPP
#define OPENTRI_MODEL_SURFACE_HPP

#include <optional>
#include <ostream>
#include <vector>

#include "opentri/ode.hpp"
#include "opentri/warping.hpp"

// Geodesics and distances on the model half-plane
// ([0, inf) x R, dx^2 + m(x)^2 dy^2) with totally geodesic boundary x = 0.

namespace opentri {

struct ModelPoint {
  double x = 0.0;
  double y = 0.0;
};

enum class GeodesicStatus { Completed, HitBoundary, WindowExit };

struct PathSample {
  double s;
  double x;
  double y;
  double xp;  // x'(s)
  double yp;  // y'(s)
};

struct ModelGeodesic {
  double clairaut = 0.0;  // nu fixed by the initial data
  int x_sign = 0;         // sign of x' at the end of the path
  std::vector<PathSample> path;
  double total_length = 0.0;
  GeodesicStatus status = GeodesicStatus::Completed;
  OdeTrajectory<4> trajectory;  // components (x, y, x', y')

  ModelPoint start() const;
  ModelPoint end() const;
  ModelPoint point_at(double s) const;
  PathSample sample_at(double s) const;

  // Angle in [0, pi] between the velocity and +d/dx at arclength s.
  double angle_at(double s, const WarpingFunction& w) const;

  // nu as measured from the path at s: m(x)^2 |y'|.
  double measured_clairaut_at(double s, const WarpingFunction& w) const;

  // Arclengths where x' changes sign.
  std::vector<double> turning_points() const;
};

// nu = m(x) sin(angle); zero exactly for boundary-ray directions.
double clairaut_constant(double x, double angle, const WarpingFunction& w);

// Unit-speed geodesic from p with initial angle against +d/dx (signed angle:
// positive sine shoots toward +y, negative toward -y). Terminates early with
// status HitBoundary on a transversal boundary hit; throws if the path
// leaves the truncation window [0, domain_max].
ModelGeodesic integrate_geodesic(ModelPoint p, double angle, double length,
                                 const WarpingFunction& w);

// Arclength of a monotone geodesic leg between levels x1 and x2 with Clairaut
// constant nu, by quadrature of m / sqrt(m^2 - nu^2). Throws if a turning
// point lies strictly inside the leg.
double length_between_parallels(double nu, double x1, double x2,
                                const WarpingFunction& w);

// Lower bound t2 - t1 + (nu^2/2) int 1/(m sqrt(m^2 - nu^2)) for the length
// of any geodesic with Clairaut constant nu between the levels; degenerate
// inputs (t2 <= t1, or nu reaching min m) fall back to t2 - t1.
double length_lower_bound(double nu, double t1, double t2,
                          const WarpingFunction& w);

struct DistanceResult {
  double distance = 0.0;
  ModelGeodesic geodesic;  // oriented from p to q
  // Shooting solutions within 1e-6 of the minimum (distinct launch angles);
  // more than one signals a cut-locus tie.
  int near_minimal_count = 1;
};

struct DistanceOptions {
  int n_starts = 64;
  double trial_tol = 1e-10;
  double final_tol = 1e-12;
};

// Distance by multi-start shooting over the launch angle, exploiting
// y-translation invariance. Ties within 1e-9 resolve to the smaller
// Clairaut constant.
DistanceResult distance(ModelPoint p, ModelPoint q, const WarpingFunction& w,
                        const DistanceOptions& opt = {});

// d(p, (c, s)): distance to a point of the parallel arc x = c.
double distance_to_parallel(ModelPoint p, double c, double s,
                            const WarpingFunction& w);

// First zero of the normal Jacobi field J'' + G(x(s)) J = 0, J(0)=0,
// J'(0)=1 along g, if any within g's length.
std::optional<double> conjugate_point_search(const ModelGeodesic& g,
                                             const WarpingFunction& w);

// CSV rows (s, x, y, angle, nu) at 12 significant digits.
void write_geodesic_csv(std::ostream& os, const ModelGeodesic& g,
                        const WarpingFunction& w);

}  // namespace opentri

#endif
