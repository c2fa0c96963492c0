#pragma once

#include "korea/datagen.hpp"
#include "korea/em_gmm.hpp"
#include "korea/vb_gmm.hpp"

#include <filesystem>
#include <string>

namespace korea {

/// Settings file shared by every CLI command. All keys are optional:
///
///   { "hyper": {"alpha0": 1, "beta0": 1, "m0": [..], "W0": [[..]], "nu0": 4},
///     "vb":    {"tol": 1e-8, "max_iter": 500, "restarts": 3},
///     "em":    {"tol": 1e-8, "max_iter": 500, "restarts": 3, "var_floor": 1e-6},
///     "synth": {"radius": 20, "wishart_dof": 5, "dirichlet_alpha": 0.2,
///               "min_weight": 0.05, "wishart_draws_covariance": true} }
struct RunConfig {
  HyperOverrides hyper;
  VbFitConfig vb;
  EmConfig em;
  SynthConfig synth;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace korea
