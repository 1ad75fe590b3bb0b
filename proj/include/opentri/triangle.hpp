#ifndef OPENTRI_TRIANGLE_HPP
#define OPENTRI_TRIANGLE_HPP

#include <vector>

#include "opentri/model_surface.hpp"

// Open triangles in the model half-plane: realization from side data
// (a, b, c), the foot-gap function Theta, gluing, and chained generalized
// triangles with their constrained shortest arc.

namespace opentri {

struct TriangleSides {
  double a = 0.0;  // d(boundary, p)
  double b = 0.0;  // d(p, q)
  double c = 0.0;  // d(boundary, q)
};

struct ModelOpenTriangle {
  TriangleSides sides;
  ModelPoint p;       // (a, 0) by normalization
  ModelPoint q;       // (c, base_gap)
  double foot_y1 = 0.0;
  double foot_y2 = 0.0;
  double angle_p = 0.0;
  double angle_q = 0.0;
  double base_gap = 0.0;  // Theta
  bool degenerate = false;
  ModelGeodesic opposite_side;  // oriented p -> q
};

// Realize the open triangle with side data (a, b, c), |a - c| <= b, vertices
// interior (a, c > 0). The realizing geodesic is found by shooting: among
// all geodesics of length b from the level x = a to the level x = c, the one
// with the largest foot displacement is the minimal one (the distance to a
// point of a parallel is strictly increasing in the foot gap).
ModelOpenTriangle build_model_triangle(const TriangleSides& sides,
                                       const WarpingFunction& w);

// Theta(a, b, c): boundary gap between the feet of the realized triangle.
double theta(const TriangleSides& sides, const WarpingFunction& w);

// Max of the six one-sided difference quotients |dTheta|/h under +-h
// perturbations of each side. All perturbed triples must stay in T.
double theta_lipschitz_probe(const TriangleSides& sides,
                             const WarpingFunction& w, double h);

// Glue two triangles sharing the middle boundary-distance (c1 == a2) with
// angle sum at the shared vertex <= pi, into the triangle with sides
// (a1, b1 + b2, c2). Checks the outer-vertex angle monotonicity conclusions.
ModelOpenTriangle glue_triangles(const ModelOpenTriangle& t1,
                                 const ModelOpenTriangle& t2,
                                 const WarpingFunction& w);

struct GeneralizedOpenTriangle {
  std::vector<ModelOpenTriangle> chain;
  std::vector<ModelPoint> vertices;  // chain vertices v_0 .. v_k
  std::vector<int> contacts;         // interior vertices touched by the arc
  double shortcut_length = 0.0;      // L(gamma-hat)
  double endpoint_distance = 0.0;    // d(p-hat, q-hat)
  double chain_length = 0.0;         // sum of piece opposite sides
  double angle_p = 0.0;              // angle of the arc at v_0 vs -d/dx
  double angle_q = 0.0;              // angle of the arc at v_k vs -d/dx
};

// Chain the pieces side by side (shared boundary segments), verify the
// interface matching and angle-sum conditions, and compute the shortest arc
// from the first vertex to the last inside the glued locally convex domain
// by rubber-band contact reduction over the interface vertices.
GeneralizedOpenTriangle build_generalized_triangle(
    const std::vector<TriangleSides>& pieces, const WarpingFunction& w);

}  // namespace opentri

#endif
