#include "opentri/verify.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "opentri/numerics.hpp"

namespace opentri {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Clock = std::chrono::steady_clock;

double elapsed_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Index-sharded parallel loop; outputs land in index order, so results are
// independent of the worker count.
template <typename Fn>
void for_each_sample(int n, int workers, Fn&& fn) {
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int k = std::min(workers, n);
  pool.reserve(k);
  for (int i = 0; i < k; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Largest sampling level (<= 3) where the warping stays well above zero;
// keeps the shooting solver in its robust regime.
double robust_t_hi(const WarpingFunction& w) {
  const double hi = std::min(3.0, 0.9 * w.domain_max());
  double best = 0.3;
  const int n = 300;
  for (int i = 0; i <= n; ++i) {
    const double t = hi * i / n;
    if (w.evaluate(t).m >= 1e-2) best = std::max(best, t);
  }
  return best;
}

ManifoldOpenTriangle sample_triangle(const TestManifold& m, SampleRng& rng,
                                     double t_hi, double max_offset) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double t1 = rng.uniform(0.2, t_hi);
    const double t2 = rng.uniform(0.2, t_hi);
    const double off = rng.uniform(0.1, max_offset);
    std::array<double, 2> du{off, 0.0};
    if (m.dim() == 3) {
      const double phi = rng.uniform(0.0, 2.0 * kPi);
      du = {off * std::cos(phi), off * std::sin(phi)};
    }
    ManifoldPoint p{t1, {0.0, 0.0}};
    ManifoldPoint q{t2, du};
    ManifoldOpenTriangle tri = open_triangle(m, p, q);
    const double margin =
        std::min(std::min(tri.angle_p, kPi - tri.angle_p),
                 std::min(tri.angle_q, kPi - tri.angle_q));
    if (margin > 1e-3) return tri;
  }
  throw std::runtime_error("triangle sampler exhausted retries");
}

void require_model(const TestManifold& m, const char* who) {
  if (!m.model()) {
    std::ostringstream msg;
    msg << who << ": manifold has no attached model";
    throw std::invalid_argument(msg.str());
  }
}

void finalize(VerificationReport& rep,
              const std::vector<std::vector<double>>& rows,
              const std::vector<int>& slack_columns) {
  rep.rows = rows;
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& r : rows)
    for (int c : slack_columns) min_slack = std::min(min_slack, r[c]);
  if (rows.empty()) min_slack = 0.0;
  rep.min_slack = min_slack;
  rep.pass = min_slack >= -rep.tol;
}

}  // namespace

void VerificationReport::write_csv(std::ostream& os) const {
  os << "id";
  for (const auto& c : columns) os << ',' << c;
  os << '\n';
  char buf[64];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << i;
    for (double v : rows[i]) {
      std::snprintf(buf, sizeof(buf), ",%.12g", v);
      os << buf;
    }
    os << '\n';
  }
}

std::string VerificationReport::summary_json() const {
  nlohmann::ordered_json j;
  j["check"] = check;
  j["n"] = rows.size();
  j["min_slack"] = min_slack;
  j["tol"] = tol;
  j["pass"] = pass;
  return j.dump(2) + "\n";
}

SectorCertificate certify_sector(const WarpingFunction& w, double t_hi,
                                 std::uint64_t seed) {
  static const double kWidths[] = {8.0, 6.0, 4.0,  3.0, 2.0, 1.5,
                                   1.0, 0.75, 0.5, 0.35, 0.25};
  const int pairs = 20;
  for (double theta : kWidths) {
    bool ok = true;
    for (int i = 0; i < pairs && ok; ++i) {
      SampleRng rng(seed ^ 0x5ec70f5ecULL, 7000 + i);
      const double x1 = rng.uniform(0.15, t_hi);
      const double x2 = rng.uniform(0.15, t_hi);
      const double dy = theta * rng.uniform(0.05, 0.95);
      DistanceResult dr;
      try {
        dr = distance({x1, 0.0}, {x2, dy}, w);
      } catch (const std::exception&) {
        ok = false;
        break;
      }
      if (dr.near_minimal_count > 1) ok = false;
      const auto conj = conjugate_point_search(dr.geodesic, w);
      if (conj && *conj < dr.distance - 1e-6) ok = false;
    }
    if (ok) return {theta, pairs, true};
  }
  return {0.0, pairs, false};
}

VerificationReport toponogov_check(const TestManifold& m,
                                   const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  require_model(m, "toponogov_check");
  const WarpingFunction& model = *m.model();

  VerificationReport rep;
  rep.check = "toponogov";
  rep.tol = opt.tol;
  rep.columns = {"a", "b", "c", "angle_p", "angle_p_model",
                 "slack_angle_p", "slack_angle_q", "slack_gap"};

  const CurvatureCertificate cert =
      curvature_bound_certificate(m, robust_t_hi(m.warping()) + 1.0, 512);
  if (!cert.pass)
    throw std::invalid_argument(
        "toponogov_check: radial curvature bound certificate failed");

  const SectorCertificate sector =
      certify_sector(model, robust_t_hi(model), opt.seed);
  if (!sector.pass || sector.theta0 <= 0.15)
    throw std::runtime_error("toponogov_check: no certified sector width");
  const double max_offset = std::max(0.11, 0.8 * sector.theta0);
  const double t_hi =
      std::min(robust_t_hi(m.warping()), robust_t_hi(model));

  std::vector<std::vector<double>> rows(opt.n_samples);
  for_each_sample(opt.n_samples, opt.workers, [&](int i) {
    SampleRng rng(opt.seed, static_cast<std::uint64_t>(i));
    ManifoldOpenTriangle tri = sample_triangle(m, rng, t_hi, max_offset);
    ModelOpenTriangle mt =
        build_model_triangle({tri.a, tri.b, tri.c}, model);
    const double sp = tri.angle_p - mt.angle_p;
    const double sq = tri.angle_q - mt.angle_q;
    const double sg = tri.foot_gap - mt.base_gap;
    rows[i] = {tri.a, tri.b, tri.c, tri.angle_p, mt.angle_p, sp, sq, sg};
  });

  finalize(rep, rows, {5, 6, 7});
  std::ostringstream note;
  note << "sector theta0=" << sector.theta0 << "; curvature slack "
       << cert.min_slack;
  rep.note = note.str();
  rep.runtime_seconds = elapsed_since(t0);
  return rep;
}

VerificationReport equality_case_check(const TestManifold& m,
                                       const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  require_model(m, "equality_case_check");
  const WarpingFunction& model = *m.model();

  // Precondition: the manifold warping IS the model warping.
  for (int i = 0; i <= 64; ++i) {
    const double t = robust_t_hi(model) * i / 64;
    if (std::abs(m.warping().evaluate(t).m - model.evaluate(t).m) > 1e-9)
      throw std::invalid_argument(
          "equality_case_check: manifold warping differs from the model");
  }

  VerificationReport rep;
  rep.check = "equality";
  rep.tol = opt.tol;
  rep.columns = {"a", "b", "c", "angle_p", "angle_p_model",
                 "slack_angle_p", "slack_angle_q", "slack_gap"};

  const SectorCertificate sector =
      certify_sector(model, robust_t_hi(model), opt.seed);
  if (!sector.pass || sector.theta0 <= 0.15)
    throw std::runtime_error("equality_case_check: no certified sector width");
  const double max_offset = std::max(0.11, 0.8 * sector.theta0);
  const double t_hi = robust_t_hi(model);

  std::vector<std::vector<double>> rows(opt.n_samples);
  std::vector<double> worst(opt.n_samples, 0.0);
  for_each_sample(opt.n_samples, opt.workers, [&](int i) {
    SampleRng rng(opt.seed, static_cast<std::uint64_t>(i));
    ManifoldOpenTriangle tri = sample_triangle(m, rng, t_hi, max_offset);
    ModelOpenTriangle mt =
        build_model_triangle({tri.a, tri.b, tri.c}, model);
    const double sp = tri.angle_p - mt.angle_p;
    const double sq = tri.angle_q - mt.angle_q;
    const double sg = tri.foot_gap - mt.base_gap;
    rows[i] = {tri.a, tri.b, tri.c, tri.angle_p, mt.angle_p, sp, sq, sg};
    worst[i] = std::max({std::abs(sp), std::abs(sq), std::abs(sg)});
  });

  rep.rows = rows;
  double max_abs = 0.0;
  for (double v : worst) max_abs = std::max(max_abs, v);
  rep.min_slack = rows.empty() ? 0.0 : -max_abs;
  rep.pass = rep.min_slack >= -rep.tol;
  std::ostringstream note;
  note << "rigidity case; max |slack| = " << max_abs;
  rep.note = note.str();
  rep.runtime_seconds = elapsed_since(t0);
  return rep;
}

namespace {

struct WeakFormResult {
  double lower = 0.0;
  double d_hat = 0.0;
  double l_hat = 0.0;
  double angle_p_hat = 0.0;
  double angle_q_hat = 0.0;
};

WeakFormResult chain_triangle(const ManifoldOpenTriangle& tri, int pieces,
                              const WarpingFunction& model) {
  const double b = tri.b;
  std::vector<TriangleSides> sides;
  sides.reserve(pieces);
  double prev_t = tri.opposite_side.point_at(0.0).t;
  for (int j = 1; j <= pieces; ++j) {
    const double s = b * j / pieces;
    const double t = tri.opposite_side.point_at(std::min(s, b)).t;
    sides.push_back({prev_t, b / pieces, t});
    prev_t = t;
  }
  GeneralizedOpenTriangle g = build_generalized_triangle(sides, model);
  WeakFormResult out;
  out.lower = tri.c - tri.a;
  out.d_hat = g.endpoint_distance;
  out.l_hat = g.shortcut_length;
  out.angle_p_hat = g.angle_p;
  out.angle_q_hat = g.angle_q;
  return out;
}

}  // namespace

VerificationReport weak_form_check(const TestManifold& m, int pieces,
                                   const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  require_model(m, "weak_form_check");
  const WarpingFunction& model = *m.model();
  if (pieces < 1) throw std::invalid_argument("weak_form_check: pieces >= 1");

  VerificationReport rep;
  rep.check = "weak_form";
  rep.tol = opt.tol;
  rep.columns = {"a",          "b",          "c",          "d_hat",
                 "L_hat",      "slack_lower", "slack_mid",  "slack_upper",
                 "slack_angle_p", "slack_angle_q", "slack_refine"};

  const double t_hi = std::min(robust_t_hi(m.warping()), robust_t_hi(model));
  const double refine_tol = 1e-4;

  std::vector<std::vector<double>> rows(opt.n_samples);
  for_each_sample(opt.n_samples, opt.workers, [&](int i) {
    SampleRng rng(opt.seed, 100000 + static_cast<std::uint64_t>(i));
    ManifoldOpenTriangle tri = sample_triangle(m, rng, t_hi, 2.0);
    const WeakFormResult w1 = chain_triangle(tri, pieces, model);
    const WeakFormResult w2 = chain_triangle(tri, 2 * pieces, model);
    const double s_lower = w1.d_hat - w1.lower;
    const double s_mid = w1.l_hat - w1.d_hat;
    const double s_upper = tri.b - w1.l_hat;
    const double s_ap = tri.angle_p - w1.angle_p_hat;
    const double s_aq = tri.angle_q - w1.angle_q_hat;
    const double refine =
        (refine_tol - std::abs(w2.l_hat - w1.l_hat)) * (opt.tol / refine_tol);
    rows[i] = {tri.a,  tri.b, tri.c, w1.d_hat, w1.l_hat, s_lower,
               s_mid, s_upper, s_ap,  s_aq,     refine};
  });

  finalize(rep, rows, {5, 6, 7, 8, 9, 10});
  rep.runtime_seconds = elapsed_since(t0);
  return rep;
}

VerificationReport alexandrov_check(const TestManifold& m, ManifoldPoint p,
                                    ManifoldPoint q, int grid_n, double tol) {
  const auto t0 = Clock::now();
  require_model(m, "alexandrov_check");
  const WarpingFunction& model = *m.model();
  if (grid_n < 3) throw std::invalid_argument("alexandrov grid too small");

  ManifoldOpenTriangle tri = open_triangle(m, p, q);
  if (tri.angle_p < 1e-6 || tri.angle_p > kPi - 1e-6 || tri.angle_q < 1e-6 ||
      tri.angle_q > kPi - 1e-6)
    throw std::invalid_argument("alexandrov_check: degenerate triangle");

  VerificationReport rep;
  rep.check = "alexandrov";
  rep.tol = tol;
  rep.columns = {"t",       "phi",      "D",         "phi_prime_fd",
                 "phi_prime_formula", "slack_mono", "slack_phi"};

  const double a = tri.a, c = tri.c;
  const double phi_tol = 1e-4;
  const double h_fd = 1e-4;

  auto phi_at = [&](double t) {
    ManifoldPoint pj{a * t, p.u};
    ManifoldPoint qj{c * t, q.u};
    return manifold_distance(m, pj, qj);
  };

  std::vector<std::vector<double>> rows;
  double prev_d = std::numeric_limits<double>::quiet_NaN();
  for (int j = 1; j <= grid_n; ++j) {
    const double t = static_cast<double>(j) / grid_n;
    ManifoldDistanceResult dr = phi_at(t);
    const double phi = dr.distance;
    const double d_val = theta({a * t, phi, c * t}, model);

    double fd = std::numeric_limits<double>::quiet_NaN();
    double formula = std::numeric_limits<double>::quiet_NaN();
    double slack_phi = tol;  // neutral when the stencil leaves (0, 1]
    if (t + h_fd <= 1.0 && t - h_fd > 0.0) {
      fd = (phi_at(t + h_fd).distance - phi_at(t - h_fd).distance) /
           (2.0 * h_fd);
      const double tp0 = dr.geodesic.trajectory.eval(3, 0.0);
      const double tpL =
          dr.geodesic.trajectory.eval(3, dr.geodesic.total_length);
      const double cos_p = -tp0;  // angle at mu1(at) against -d/dt
      const double cos_q = tpL;
      formula = a * cos_p + c * cos_q;
      slack_phi = (phi_tol - std::abs(fd - formula)) * (tol / phi_tol);
    }
    const double slack_mono =
        std::isnan(prev_d) ? tol : (prev_d - d_val);
    rows.push_back({t, phi, d_val, fd, formula, slack_mono, slack_phi});
    prev_d = d_val;
  }

  finalize(rep, rows, {5, 6});
  rep.runtime_seconds = elapsed_since(t0);
  return rep;
}

VerificationReport alexandrov_check_sampled(const TestManifold& m, int grid_n,
                                            const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  require_model(m, "alexandrov_check");
  const WarpingFunction& model = *m.model();
  const double t_hi = std::min(robust_t_hi(m.warping()), robust_t_hi(model));

  VerificationReport rep;
  rep.check = "alexandrov";
  rep.tol = opt.tol;
  rep.columns = {"triangle", "t",        "phi",        "D",
                 "phi_prime_fd", "phi_prime_formula", "slack_mono",
                 "slack_phi"};

  std::vector<VerificationReport> parts(opt.n_samples);
  for_each_sample(opt.n_samples, opt.workers, [&](int i) {
    SampleRng rng(opt.seed, 200000 + static_cast<std::uint64_t>(i));
    ManifoldOpenTriangle tri = sample_triangle(m, rng, t_hi, 2.0);
    parts[i] = alexandrov_check(m, tri.p, tri.q, grid_n, opt.tol);
  });

  std::vector<std::vector<double>> rows;
  double min_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < opt.n_samples; ++i) {
    for (const auto& r : parts[i].rows) {
      std::vector<double> row;
      row.push_back(i);
      row.insert(row.end(), r.begin(), r.end());
      rows.push_back(std::move(row));
    }
    min_slack = std::min(min_slack, parts[i].min_slack);
  }
  rep.rows = std::move(rows);
  rep.min_slack = opt.n_samples == 0 ? 0.0 : min_slack;
  rep.pass = rep.min_slack >= -rep.tol;
  rep.runtime_seconds = elapsed_since(t0);
  return rep;
}

VerificationReport splitting_check(const TestManifold& m,
                                   const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  require_model(m, "splitting_check");
  const WarpingFunction& model = *m.model();

  VerificationReport rep;
  rep.check = "splitting";
  rep.tol = opt.tol;

  const double horizon = model.domain_max();
  const SplittingClass cls = splitting_class(model, horizon);
  const std::string label = to_string(cls);

  if (cls == SplittingClass::Neither || cls == SplittingClass::Inconclusive) {
    rep.columns = {};
    rep.rows = {};
    rep.min_slack = 0.0;
    rep.pass = true;
    rep.note = "classification " + label + ": no splitting conclusion";
    rep.runtime_seconds = elapsed_since(t0);
    return rep;
  }

  if (cls == SplittingClass::ST1) {
    // Isometric splitting: totally geodesic boundary, K == G along rays,
    // and the metric is the warped product with the model's own warping.
    rep.columns = {"t", "radial_curvature", "model_curvature", "slack_kg",
                   "slack_warp", "slack_shape"};
    const double kg_tol = 1e-8;
    const double t_hi = std::min(m.t_max(), 0.9 * model.domain_max());
    const int n = 256;
    std::vector<std::vector<double>> rows;
    const double shape_slack =
        (kg_tol - std::abs(m.boundary_shape_eigenvalue())) *
        (opt.tol / kg_tol);
    for (int i = 0; i <= n; ++i) {
      const double t = t_hi * i / n;
      const auto e = m.warping().evaluate(t);
      const double radial = -e.mpp / e.m;
      const double g = model.radial_curvature(t);
      const double mk = model.evaluate(t).m;
      const double slack_kg =
          (kg_tol - std::abs(radial - g)) * (opt.tol / kg_tol);
      const double slack_warp =
          (kg_tol - std::abs(e.m - mk)) * (opt.tol / kg_tol);
      rows.push_back({t, radial, g, slack_kg, slack_warp, shape_slack});
    }
    finalize(rep, rows, {3, 4, 5});
    rep.note = "classification ST1 (numerical heuristic): warped-product "
               "structure asserted";
    rep.runtime_seconds = elapsed_since(t0);
    return rep;
  }

  // ST2: unique-foot surrogate on random interior points.
  rep.columns = {"t", "u_norm", "foot_spread", "slack_unique"};
  const double foot_tol = 1e-6;
  const double t_hi = robust_t_hi(m.warping());
  std::vector<std::vector<double>> rows(opt.n_samples);
  for_each_sample(opt.n_samples, opt.workers, [&](int i) {
    SampleRng rng(opt.seed, 300000 + static_cast<std::uint64_t>(i));
    const double t = rng.uniform(0.3, t_hi);
    std::array<double, 2> u{rng.uniform(-2.0, 2.0), 0.0};
    std::array<double, 2> e{1.0, 0.0};
    if (m.dim() == 3) {
      u[1] = rng.uniform(-2.0, 2.0);
      const double phi = rng.uniform(0.0, 2.0 * kPi);
      e = {std::cos(phi), std::sin(phi)};
    }
    ManifoldPoint p{t, u};
    // Scan feet offsets along a ray in the boundary; the distance to the
    // offset boundary point must have its unique minimum at offset zero.
    const int grid = 21;
    const double max_off = 2.0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> vals(grid);
    for (int jj = 0; jj < grid; ++jj) {
      const double off = max_off * jj / (grid - 1);
      ManifoldPoint bp{0.0, {u[0] + off * e[0], u[1] + off * e[1]}};
      ManifoldDistanceResult dr = manifold_distance(m, p, bp);
      vals[jj] = dr.distance;
      best = std::min(best, dr.distance);
    }
    double spread = 0.0;
    for (int jj = 0; jj < grid; ++jj)
      if (vals[jj] <= best + 1e-9) spread = max_off * jj / (grid - 1);
    const double slack = (foot_tol - spread) * (opt.tol / foot_tol);
    rows[i] = {t, std::hypot(u[0], u[1]), spread, slack};
  });
  finalize(rep, rows, {3});
  rep.note = "classification ST2 (numerical heuristic): unique-foot "
             "surrogate asserted";
  rep.runtime_seconds = elapsed_since(t0);
  return rep;
}

VerificationReport slab_check(double ell, int dim, const VerifyOptions& opt) {
  const auto t0 = Clock::now();
  if (ell <= 0.0) throw std::invalid_argument("slab length must be positive");
  TestManifold m = TestManifold::slab(dim, ell, WarpingFunction::euclidean());

  VerificationReport rep;
  rep.check = "slab";
  rep.tol = opt.tol;
  rep.columns = {"t",           "du",          "slack_product",
                 "slack_boundary", "slack_half", "slack_level",
                 "slack_equidistant", "slack_mid"};

  const double prod_tol = 1e-9;
  const double level_tol = 1e-8;

  std::vector<std::vector<double>> rows(opt.n_samples);
  for_each_sample(opt.n_samples, opt.workers, [&](int i) {
    SampleRng rng(opt.seed, 400000 + static_cast<std::uint64_t>(i));
    auto draw_u = [&](double lo, double hi) {
      std::array<double, 2> u{rng.uniform(lo, hi), 0.0};
      if (dim == 3) u[1] = rng.uniform(lo, hi);
      return u;
    };
    ManifoldPoint p{rng.uniform(0.05 * ell, 0.95 * ell), draw_u(-2.0, 2.0)};
    ManifoldPoint q{rng.uniform(0.05 * ell, 0.95 * ell), draw_u(-2.0, 2.0)};

    const double du = std::hypot(q.u[0] - p.u[0], q.u[1] - p.u[1]);
    const double d_formula = std::hypot(q.t - p.t, du);
    double slack_product = opt.tol;
    if (d_formula > 1e-12) {
      const double d_meas = manifold_distance(m, p, q).distance;
      slack_product = (prod_tol - std::abs(d_meas - d_formula)) *
                      (opt.tol / prod_tol);
    }

    // d(boundary, p) = min(t, ell - t) <= ell / 2, re-measured by shooting
    // to boundary points at fiber offsets.
    const double d_bd = std::min(p.t, ell - p.t);
    double nearest = std::numeric_limits<double>::infinity();
    for (int jj = 0; jj <= 8; ++jj) {
      const double off = 2.0 * jj / 8;
      ManifoldPoint b0{0.0, {p.u[0] + off, p.u[1]}};
      ManifoldPoint b1{ell, {p.u[0] + off, p.u[1]}};
      nearest = std::min(nearest, manifold_distance(m, p, b0).distance);
      nearest = std::min(nearest, manifold_distance(m, p, b1).distance);
    }
    const double slack_boundary = nearest - d_bd;  // >= 0: t-line minimal
    const double slack_half = 0.5 * ell - d_bd;

    // Geodesics tangent to a level set stay in it.
    TangentVector v{0.0, {1.0, 0.0}};
    ManifoldGeodesic level =
        integrate_manifold_geodesic(m, {p.t, p.u}, v, 5.0);
    double drift = 0.0;
    for (const auto& smp : level.path)
      drift = std::max(drift, std::abs(smp.t - p.t));
    const double slack_level = (level_tol - drift) * (opt.tol / level_tol);

    // Equidistance of the middle level from both components.
    ManifoldPoint mid{0.5 * ell, p.u};
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = std::numeric_limits<double>::infinity();
    for (int jj = 0; jj <= 8; ++jj) {
      const double off = 2.0 * jj / 8;
      d1 = std::min(d1, manifold_distance(m, mid,
                                          {0.0, {p.u[0] + off, p.u[1]}})
                            .distance);
      d2 = std::min(d2, manifold_distance(m, mid,
                                          {ell, {p.u[0] + off, p.u[1]}})
                            .distance);
    }
    const double slack_eq = opt.tol - std::abs(d1 - d2);
    const double slack_mid = opt.tol - std::abs(d1 - 0.5 * ell);

    rows[i] = {p.t,        du,          slack_product, slack_boundary,
               slack_half, slack_level, slack_eq,      slack_mid};
  });

  finalize(rep, rows, {2, 3, 4, 5, 6, 7});
  rep.runtime_seconds = elapsed_since(t0);
  return rep;
}

}  // namespace opentri
