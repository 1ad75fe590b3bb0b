#ifndef OPENTRI_MANIFOLD_HPP
#define OPENTRI_MANIFOLD_HPP

#include <array>
#include <optional>
#include <vector>

#include "opentri/model_surface.hpp"
#include "opentri/warping.hpp"

// Test manifolds with convex boundary: warped products dt^2 + f(t)^2 (flat
// fiber) over a line or plane fiber, plus flat slabs [0, l] x fiber with two
// boundary components. Boundary-perpendicular geodesics are the t-lines, so
// boundary segments, radial curvature, and open triangles are all
// computable; distances reduce to a 2-dimensional shooting problem by fiber
// translation invariance.

namespace opentri {

enum class FiberKind { Line, Plane };

class TestManifold {
 public:
  // dt^2 + f(t)^2 (du^2 [+ dv^2]); boundary t = 0.
  static TestManifold warped(int dim, const WarpingFunction& f,
                             std::optional<WarpingFunction> model);
  // Flat slab [0, length] x fiber with boundary components t=0 and t=length.
  static TestManifold slab(int dim, double length,
                           std::optional<WarpingFunction> model);

  int dim() const { return dim_; }
  FiberKind fiber() const { return fiber_; }
  bool is_slab() const { return slab_length_.has_value(); }
  double slab_length() const { return slab_length_.value(); }
  const WarpingFunction& warping() const { return f_; }
  const std::optional<WarpingFunction>& model() const { return model_; }
  double boundary_shape_eigenvalue() const { return shape_eigenvalue_; }

  // Upper end of the t-window: slab length, or the warping domain.
  double t_max() const {
    return slab_length_ ? *slab_length_ : f_.domain_max();
  }

 private:
  TestManifold(int dim, WarpingFunction f, std::optional<WarpingFunction> model,
               std::optional<double> slab_length);

  int dim_ = 3;
  FiberKind fiber_ = FiberKind::Plane;
  WarpingFunction f_;
  std::optional<WarpingFunction> model_;
  std::optional<double> slab_length_;
  double shape_eigenvalue_ = 0.0;
};

struct ManifoldPoint {
  double t = 0.0;
  std::array<double, 2> u{0.0, 0.0};
};

struct ManifoldSample {
  double s;
  double t;
  std::array<double, 2> u;
  double tp;
  std::array<double, 2> up;
};

struct ManifoldGeodesic {
  std::vector<ManifoldSample> path;
  double total_length = 0.0;
  GeodesicStatus status = GeodesicStatus::Completed;
  OdeTrajectory<6> trajectory;  // (t, u1, u2, t', u1', u2')

  ManifoldPoint start() const;
  ManifoldPoint end() const;
  ManifoldPoint point_at(double s) const;

  // Conserved fiber momenta f(t)^2 u_i' measured from the path at s.
  std::array<double, 2> momenta_at(double s, const TestManifold& m) const;
  // |t'^2 + f^2 |u'|^2 - 1| at s.
  double speed_defect_at(double s, const TestManifold& m) const;
};

struct TangentVector {
  double vt = 0.0;
  std::array<double, 2> vu{0.0, 0.0};
};

// Unit-speed geodesic from p with initial direction v (normalized
// internally). Boundary hits terminate with status; leaving the t-window of
// a non-slab manifold throws.
ManifoldGeodesic integrate_manifold_geodesic(const TestManifold& m,
                                             ManifoldPoint p, TangentVector v,
                                             double length);

struct BoundarySegmentInfo {
  ManifoldPoint foot;
  double length = 0.0;
  int component = 0;  // 0: t=0, 1: t=slab_length
};

// The boundary segment through p is the t-line: foot, length, component.
BoundarySegmentInfo boundary_segment(const TestManifold& m, ManifoldPoint p);

struct ManifoldDistanceResult {
  double distance = 0.0;
  ManifoldGeodesic geodesic;  // oriented p -> q
  // Shooting solutions within 1e-6 of the minimum (distinct launch angles).
  int near_minimal_count = 1;
};

// Multi-start shooting on the reduced (t, |du|) problem.
ManifoldDistanceResult manifold_distance(const TestManifold& m,
                                         ManifoldPoint p, ManifoldPoint q);

struct ManifoldOpenTriangle {
  ManifoldPoint p, q;
  double a = 0.0;  // d(boundary, p)
  double b = 0.0;  // d(p, q)
  double c = 0.0;  // d(boundary, q)
  double angle_p = 0.0;
  double angle_q = 0.0;
  double foot_gap = 0.0;  // flat fiber distance between the feet
  ManifoldGeodesic opposite_side;
};

ManifoldOpenTriangle open_triangle(const TestManifold& m, ManifoldPoint p,
                                   ManifoldPoint q);

struct CurvatureCertificate {
  double min_slack = 0.0;  // min over the grid of (-f''/f - G)
  double horizon = 0.0;
  int samples = 0;
  bool pass = false;
};

// Radial curvature bound against the attached model: the radial sectional
// curvatures of the warped product are -f''/f.
CurvatureCertificate curvature_bound_certificate(const TestManifold& m,
                                                 double horizon, int samples);

// L(s, theta) = d(boundary, exp_p(s xi(theta))) where xi(theta) makes angle
// theta with the outward radial direction +d/dt. Throws if the step leaves
// the manifold.
double variational_length(const TestManifold& m, ManifoldPoint p, double theta,
                          double s);

}  // namespace opentri

#endif
