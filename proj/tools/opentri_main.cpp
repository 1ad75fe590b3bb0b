#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "opentri/config.hpp"
#include "opentri/jacobi.hpp"
#include "opentri/triangle.hpp"
#include "opentri/verify.hpp"

namespace {

using namespace opentri;

std::string fmt12(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Axis spec: a single value "3" or a range "lo:hi:n".
std::vector<double> parse_axis(const std::string& s) {
  const auto c1 = s.find(':');
  if (c1 == std::string::npos) return {std::stod(s)};
  const auto c2 = s.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw std::invalid_argument("range must be lo:hi:n");
  const double lo = std::stod(s.substr(0, c1));
  const double hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
  const int n = std::stoi(s.substr(c2 + 1));
  if (n < 1) throw std::invalid_argument("range needs n >= 1");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::invalid_argument("cannot open output file: " + path);
  return file;
}

int emit_report(const VerificationReport& rep, const std::string& out_dir) {
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(out_dir + "/samples.csv", std::ios::binary);
    rep.write_csv(csv);
    std::ofstream summary(out_dir + "/summary.json", std::ios::binary);
    summary << rep.summary_json();
  }
  std::cout << rep.summary_json();
  if (!rep.note.empty()) std::cerr << "note: " << rep.note << "\n";
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"opentri: comparison geometry on manifolds with boundary"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override");

  RunConfig cfg;

  std::string model_flag, manifold_flag, out_flag;
  int n_flag = -1, workers_flag = -1, pieces_flag = -1, grid_flag = -1;
  double tol_flag = -1.0, slab_flag = -1.0;
  std::int64_t seed_flag = -1;
  app.add_option("--model", model_flag, "model warping tag");
  app.add_option("--manifold", manifold_flag, "test manifold tag");
  app.add_option("--n", n_flag, "sample count");
  app.add_option("--seed", seed_flag, "random seed");
  app.add_option("--tol", tol_flag, "report tolerance");
  app.add_option("--out", out_flag, "output file or directory");
  app.add_option("--workers", workers_flag, "worker threads (0 = cores)");
  app.add_option("--slab-length", slab_flag, "slab length");
  app.add_option("--pieces", pieces_flag, "weak-form chain pieces");
  app.add_option("--grid", grid_flag, "alexandrov t-grid size");

  // geodesic
  auto* geo = app.add_subcommand("geodesic", "integrate and dump a geodesic");
  double gx = 1.0, gy = 0.0, gangle = 0.0, glength = 1.0;
  double gt = 1.0, gu1 = 0.0, gu2 = 0.0, gvt = 1.0, gvu1 = 0.0, gvu2 = 0.0;
  geo->add_option("--x", gx, "model start x");
  geo->add_option("--y", gy, "model start y");
  geo->add_option("--angle", gangle, "model launch angle vs +d/dx");
  geo->add_option("--length", glength, "arclength")->required();
  geo->add_option("--t", gt, "manifold start t");
  geo->add_option("--u1", gu1, "manifold start u1");
  geo->add_option("--u2", gu2, "manifold start u2");
  geo->add_option("--vt", gvt, "manifold direction t-component");
  geo->add_option("--vu1", gvu1, "manifold direction u1-component");
  geo->add_option("--vu2", gvu2, "manifold direction u2-component");

  // triangle
  auto* tri = app.add_subcommand("triangle", "realize a model open triangle");
  double ta = 1, tb = 1, tc = 1;
  tri->add_option("--a", ta)->required();
  tri->add_option("--b", tb)->required();
  tri->add_option("--c", tc)->required();

  // theta
  auto* th = app.add_subcommand("theta", "evaluate Theta on values or grids");
  std::string ax_a, ax_b, ax_c;
  th->add_option("--a", ax_a)->required();
  th->add_option("--b", ax_b)->required();
  th->add_option("--c", ax_c)->required();

  // jacobi
  auto* jac = app.add_subcommand("jacobi", "solve f'' + K f = 0 and dump");
  double jk = 0.0, jf0 = 1.0, jfp0 = 0.0, jhorizon = 10.0;
  bool jk_from_model = false;
  jac->add_option("--k", jk, "constant curvature K");
  jac->add_flag("--model-curvature", jk_from_model,
                "use the model's radial curvature as K");
  jac->add_option("--f0", jf0, "f(0)");
  jac->add_option("--fp0", jfp0, "f'(0)");
  jac->add_option("--horizon", jhorizon, "integration horizon");

  // classify
  auto* cls = app.add_subcommand("classify", "splitting class of a model");
  double cls_horizon = 20.0;
  cls->add_option("--horizon", cls_horizon, "classification horizon");

  // verify
  auto* ver = app.add_subcommand("verify", "run a verification check");
  std::string check;
  ver->add_option("check", check,
                  "toponogov | equality | weak | alexandrov | splitting | slab")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) cfg = RunConfig::from_file(config_path);
    if (!model_flag.empty()) cfg.model = model_flag;
    if (!manifold_flag.empty()) cfg.manifold = manifold_flag;
    if (n_flag >= 0) cfg.n = n_flag;
    if (seed_flag >= 0) cfg.seed = static_cast<std::uint64_t>(seed_flag);
    if (tol_flag >= 0) cfg.tol = tol_flag;
    if (!out_flag.empty()) cfg.out = out_flag;
    if (workers_flag >= 0) cfg.workers = workers_flag;
    if (slab_flag > 0) cfg.slab_length = slab_flag;
    if (pieces_flag > 0) cfg.pieces = pieces_flag;
    if (grid_flag > 0) cfg.grid = grid_flag;
    if (cfg.workers <= 0)
      cfg.workers = static_cast<int>(std::thread::hardware_concurrency());
    if (cfg.workers <= 0) cfg.workers = 1;

    if (*geo) {
      std::ofstream file;
      std::ostream& os = open_output(file, cfg.out);
      if (!cfg.manifold.is_null()) {
        TestManifold m = build_manifold(cfg.manifold, std::nullopt,
                                        cfg.slab_length);
        ManifoldGeodesic g = integrate_manifold_geodesic(
            m, {gt, {gu1, gu2}}, {gvt, {gvu1, gvu2}}, glength);
        os << "s,t,u1,u2,tp,u1p,u2p\n";
        for (const auto& smp : g.path)
          os << fmt12(smp.s) << ',' << fmt12(smp.t) << ',' << fmt12(smp.u[0])
             << ',' << fmt12(smp.u[1]) << ',' << fmt12(smp.tp) << ','
             << fmt12(smp.up[0]) << ',' << fmt12(smp.up[1]) << '\n';
      } else {
        WarpingFunction w = build_model(cfg.model);
        ModelGeodesic g = integrate_geodesic({gx, gy}, gangle, glength, w);
        write_geodesic_csv(os, g, w);
      }
      return 0;
    }

    if (*tri) {
      WarpingFunction w = build_model(cfg.model);
      ModelOpenTriangle t = build_model_triangle({ta, tb, tc}, w);
      std::cout << "a,b,c,angle_p,angle_q,theta,degenerate\n"
                << fmt12(t.sides.a) << ',' << fmt12(t.sides.b) << ','
                << fmt12(t.sides.c) << ',' << fmt12(t.angle_p) << ','
                << fmt12(t.angle_q) << ',' << fmt12(t.base_gap) << ','
                << (t.degenerate ? 1 : 0) << "\n";
      return 0;
    }

    if (*th) {
      WarpingFunction w = build_model(cfg.model);
      const auto as = parse_axis(ax_a), bs = parse_axis(ax_b),
                 cs = parse_axis(ax_c);
      if (as.size() == 1 && bs.size() == 1 && cs.size() == 1) {
        std::cout << fmt12(theta({as[0], bs[0], cs[0]}, w)) << "\n";
        return 0;
      }
      std::ofstream file;
      std::ostream& os = open_output(file, cfg.out);
      os << "a,b,c,theta\n";
      for (double a : as)
        for (double b : bs)
          for (double c : cs)
            os << fmt12(a) << ',' << fmt12(b) << ',' << fmt12(c) << ','
               << fmt12(theta({a, b, c}, w)) << '\n';
      return 0;
    }

    if (*jac) {
      CurvatureProfile prof = CurvatureProfile::constant(jk);
      if (jk_from_model) {
        WarpingFunction w = build_model(cfg.model);
        prof.g = [w](double t) { return w.radial_curvature(t); };
      }
      JacobiSolution sol = solve_jacobi(prof, jf0, jfp0, jhorizon);
      const auto zero = first_zero(sol);
      std::ofstream file;
      std::ostream& os = open_output(file, cfg.out);
      os << "t,f,fp\n";
      for (const auto& st : sol.trajectory.steps)
        os << fmt12(st.s1) << ',' << fmt12(st.y1[0]) << ',' << fmt12(st.y1[1])
           << '\n';
      std::cout << "first_zero="
                << (zero ? fmt12(*zero) : std::string("none")) << "\n";
      return 0;
    }

    if (*cls) {
      WarpingFunction w = build_model(cfg.model);
      std::cout << to_string(
                       splitting_class(w, std::min(cls_horizon,
                                                   w.domain_max())))
                << "\n";
      return 0;
    }

    if (*ver) {
      VerifyOptions opt;
      opt.n_samples = cfg.n;
      opt.tol = cfg.tol;
      opt.seed = cfg.seed;
      opt.workers = cfg.workers;

      if (check == "slab") {
        const int dim =
            cfg.manifold.is_string()
                ? (cfg.manifold.get<std::string>().back() == '2' ? 2 : 3)
                : 3;
        return emit_report(slab_check(cfg.slab_length, dim, opt), cfg.out);
      }

      std::optional<WarpingFunction> model;
      if (!cfg.model.is_null()) model = build_model(cfg.model);
      TestManifold m =
          build_manifold(cfg.manifold, std::move(model), cfg.slab_length);

      VerificationReport rep;
      if (check == "toponogov")
        rep = toponogov_check(m, opt);
      else if (check == "equality")
        rep = equality_case_check(m, opt);
      else if (check == "weak")
        rep = weak_form_check(m, cfg.pieces, opt);
      else if (check == "alexandrov")
        rep = alexandrov_check_sampled(m, cfg.grid, opt);
      else if (check == "splitting")
        rep = splitting_check(m, opt);
      else {
        std::cerr << "unknown check: " << check << "\n";
        return 2;
      }
      return emit_report(rep, cfg.out);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
