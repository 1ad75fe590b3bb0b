#ifndef OPENTRI_VERIFY_HPP
#define OPENTRI_VERIFY_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "opentri/manifold.hpp"
#include "opentri/triangle.hpp"

// End-to-end numerical certification of the comparison statements on test
// manifolds: the open-triangle comparison inequalities and rigidity, the
// weak (chained) form, Alexandrov convexity of the matched foot gap, the
// splitting conditions, and the flat slab. Reports carry per-sample slack
// rows; a report passes iff its minimum (tolerance-normalized) slack is
// >= -tol. All samplers draw per-sample random streams, so reports are
// byte-identical for a fixed seed regardless of worker count.

namespace opentri {

struct VerificationReport {
  std::string check;
  std::vector<std::string> columns;         // excluding the leading id
  std::vector<std::vector<double>> rows;
  double min_slack = 0.0;
  double tol = 0.0;
  bool pass = false;
  double runtime_seconds = 0.0;  // not serialized
  std::string note;

  void write_csv(std::ostream& os) const;
  std::string summary_json() const;  // {check, n, min_slack, tol, pass}
};

struct VerifyOptions {
  int n_samples = 100;
  double tol = 1e-6;
  std::uint64_t seed = 7;
  int workers = 1;
};

struct SectorCertificate {
  double theta0 = 0.0;
  int pairs_checked = 0;
  bool pass = false;
};

// Desk-scale surrogate for the cut-point-free-sector hypothesis: largest
// tested sector width for which sampled minimal geodesics show no interior
// conjugate point and the shooting solver finds a unique minimizer.
SectorCertificate certify_sector(const WarpingFunction& w, double t_hi,
                                 std::uint64_t seed);

// Angle and foot-gap comparison on random open triangles against the model
// triangle with the same side data.
VerificationReport toponogov_check(const TestManifold& m,
                                   const VerifyOptions& opt);

// Rigidity: manifold warping equal to the model's; all slacks must vanish
// to tolerance. Rows carry signed slacks; min_slack is -max|slack|.
VerificationReport equality_case_check(const TestManifold& m,
                                       const VerifyOptions& opt);

// Chain-subdivided triangles against generalized model triangles:
// d(bd,q)-d(bd,p) <= d(p^,q^) <= L(gamma^) <= d(p,q)+tol plus the outer
// angle inequalities; also checks refinement stability pieces vs 2*pieces.
VerificationReport weak_form_check(const TestManifold& m, int pieces,
                                   const VerifyOptions& opt);

// Alexandrov convexity for one triangle: D(t) = Theta(at, phi(t), ct)
// non-increasing on a t-grid, plus the first-variation identity
// phi'(t) = a cos(angle at mu1(at)) + c cos(angle at mu2(ct)) by central
// differences (checked at its own 1e-4 tolerance, normalized into the
// report tolerance).
VerificationReport alexandrov_check(const TestManifold& m, ManifoldPoint p,
                                    ManifoldPoint q, int grid_n, double tol);

// Sampled wrapper: n_samples random non-degenerate triangles.
VerificationReport alexandrov_check_sampled(const TestManifold& m, int grid_n,
                                            const VerifyOptions& opt);

// ST1: shape eigenvalue zero, -f''/f == G, and f == m on a grid (warped
// structure). ST2: unique-foot surrogate on random interior points.
// Neither: no assertion, reported as such.
VerificationReport splitting_check(const TestManifold& m,
                                   const VerifyOptions& opt);

// Flat slab [0, l] x fiber: product distance identity, geodesic level sets,
// and the equidistant middle level.
VerificationReport slab_check(double ell, int dim, const VerifyOptions& opt);

}  // namespace opentri

#endif
