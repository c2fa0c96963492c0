#pragma once

#include "korea/dataset.hpp"
#include "korea/densities.hpp"
#include "korea/em_gmm.hpp"
#include "korea/rng.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace korea {

SimplexVector sample_dirichlet(const Eigen::VectorXd& alpha, Rng& rng);
SimplexVector sample_dirichlet(const Eigen::VectorXd& alpha, std::uint64_t seed);

/// Bartlett decomposition: L A A^T L^T with L the Cholesky factor of `scale`,
/// A lower triangular, A_ii ~ sqrt(chi2(dof - i)), A_ij ~ N(0, 1) below.
SpdMatrix sample_wishart(const SpdMatrix& scale, double dof, Rng& rng);
SpdMatrix sample_wishart(const SpdMatrix& scale, double dof, std::uint64_t seed);

/// Planar benchmark: K-hat means evenly spaced on a circle, Wishart-drawn
/// covariances and symmetric-Dirichlet weights.
struct SynthConfig {
  int k_hat = 1;
  int n = 100;
  std::uint64_t seed = 1;
  double radius = 20.0;
  double wishart_dof = 5.0;
  std::optional<double> dirichlet_alpha;  // defaults to 1 / k_hat
  double min_weight = 0.0;
  /// When false the Wishart draw is used as the precision instead.
  bool wishart_draws_covariance = true;

  void validate() const;
};

struct LabeledDataset {
  Dataset data;
  std::vector<int> labels;  // 0-based
  GmmParams true_params;
  int weight_redraws = 0;
};

inline constexpr int kMaxWeightRedraws = 10000;

LabeledDataset sample_synthetic(const SynthConfig& cfg);

}  // namespace korea
