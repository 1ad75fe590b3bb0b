#include "opentri/config.hpp"

#include <fstream>

namespace opentri {

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config parse error: " + std::string(e.what()));
  }
  RunConfig cfg;
  if (j.contains("model")) cfg.model = j["model"];
  if (j.contains("manifold")) cfg.manifold = j["manifold"];
  if (j.contains("n")) cfg.n = j["n"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  if (j.contains("slab_length"))
    cfg.slab_length = j["slab_length"].get<double>();
  if (j.contains("pieces")) cfg.pieces = j["pieces"].get<int>();
  if (j.contains("grid")) cfg.grid = j["grid"].get<int>();
  return cfg;
}

WarpingFunction build_model(const nlohmann::json& spec,
                            double default_domain_max) {
  if (spec.is_null())
    throw std::invalid_argument("no model specified");
  if (spec.is_string())
    return WarpingFunction::from_tag(spec.get<std::string>(),
                                     default_domain_max);
  if (!spec.is_object())
    throw std::invalid_argument("model spec must be a tag or an object");

  const double domain_max = spec.value("domain_max", default_domain_max);
  if (spec.contains("tag"))
    return WarpingFunction::from_tag(spec["tag"].get<std::string>(),
                                     domain_max);
  if (!spec.contains("curvature"))
    throw std::invalid_argument("model object needs \"tag\" or \"curvature\"");

  const auto& cj = spec["curvature"];
  PiecewisePolynomial poly;
  for (const auto& pj : cj.at("pieces")) {
    PiecewisePolynomial::Piece piece;
    piece.t0 = pj.at("t0").get<double>();
    piece.t1 = pj.at("t1").get<double>();
    piece.coeffs = pj.at("coeffs").get<std::vector<double>>();
    poly.pieces.push_back(std::move(piece));
  }
  if (poly.pieces.empty())
    throw std::invalid_argument("curvature profile has no pieces");
  return WarpingFunction::from_curvature(
      CurvatureProfile::from_polynomial(poly), domain_max);
}

namespace {

struct TagParts {
  std::string f_tag;
  int dim = 3;
  bool slab = false;
};

TagParts parse_manifold_tag(const std::string& tag) {
  TagParts out;
  std::string base = tag;
  if (!base.empty() && (base.back() == '2' || base.back() == '3')) {
    out.dim = base.back() - '0';
    base.pop_back();
  }
  if (base == "flat")
    out.f_tag = "euclidean";
  else if (base == "cosh")
    out.f_tag = "hyperbolic";
  else if (base == "gauss")
    out.f_tag = "gauss";
  else if (base == "slab")
    out.slab = true;
  else
    throw std::invalid_argument("unknown manifold tag: " + tag);
  return out;
}

}  // namespace

TestManifold build_manifold(const nlohmann::json& spec,
                            std::optional<WarpingFunction> model_override,
                            double default_slab_length) {
  if (spec.is_null())
    throw std::invalid_argument("no manifold specified");

  if (spec.is_string()) {
    const TagParts parts = parse_manifold_tag(spec.get<std::string>());
    if (parts.slab)
      return TestManifold::slab(parts.dim, default_slab_length,
                                std::move(model_override));
    return TestManifold::warped(parts.dim,
                                WarpingFunction::from_tag(parts.f_tag),
                                std::move(model_override));
  }
  if (!spec.is_object())
    throw std::invalid_argument("manifold spec must be a tag or an object");

  const int dim = spec.value("dim", 3);
  std::optional<WarpingFunction> model = std::move(model_override);
  if (!model && spec.contains("model")) model = build_model(spec["model"]);

  const std::string fiber = spec.value("fiber", std::string("plane"));
  if (fiber == "slab") {
    const double ell = spec.value("slab_length", default_slab_length);
    return TestManifold::slab(dim, ell, std::move(model));
  }
  if (fiber != "line" && fiber != "plane")
    throw std::invalid_argument("manifold fiber must be line, plane, or slab");
  const int effective_dim = fiber == "line" ? 2 : dim;
  if (!spec.contains("f"))
    throw std::invalid_argument("manifold object needs a warping \"f\"");
  return TestManifold::warped(effective_dim, build_model(spec["f"]),
                              std::move(model));
}

}  // namespace opentri
