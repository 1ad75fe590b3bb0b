#ifndef OPENTRI_CONFIG_HPP
#define OPENTRI_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "opentri/manifold.hpp"
#include "opentri/warping.hpp"

// Run configuration for the batch front-end: a JSON config file (nested
// tables) whose entries are overridden by command-line flags.

namespace opentri {

struct RunConfig {
  nlohmann::json model;     // tag string or {"curvature": {...}, "domain_max"}
  nlohmann::json manifold;  // tag string or {"fiber", "dim", "f", "slab_length"}
  int n = 100;
  std::uint64_t seed = 7;
  double tol = 1e-6;
  std::string out;
  int workers = 0;  // 0 = available cores
  double slab_length = 2.0;
  int pieces = 8;    // weak-form chain pieces
  int grid = 50;     // alexandrov t-grid

  static RunConfig from_file(const std::string& path);
};

// Model spec: "euclidean" | "hyperbolic" | "gauss" or an object
// {"curvature": {"pieces": [{"t0", "t1", "coeffs": [...]}, ...]},
//  "domain_max": 20}.
WarpingFunction build_model(const nlohmann::json& spec,
                            double default_domain_max = 20.0);

// Manifold spec: tag "flat2|flat3|cosh2|cosh3|gauss2|gauss3|slab2|slab3"
// or an object {"fiber": "line|plane|slab", "dim": 2|3, "f": <model spec>,
// "slab_length": l, "model": <model spec>}. A model passed here overrides
// any model named inside the spec.
TestManifold build_manifold(const nlohmann::json& spec,
                            std::optional<WarpingFunction> model_override,
                            double default_slab_length = 2.0);

}  // namespace opentri

#endif
