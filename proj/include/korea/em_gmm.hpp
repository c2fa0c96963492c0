#pragma once

#include "korea/dataset.hpp"
#include "korea/densities.hpp"

#include <cstdint>
#include <vector>

namespace korea {

/// Mixture weights, means and precision matrices of a K-component GMM.
struct GmmParams {
  Eigen::VectorXd weights;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> precisions;

  int components() const { return static_cast<int>(weights.size()); }
  Eigen::Index dim() const { return means.empty() ? 0 : means.front().size(); }
  /// Throws NotSimplex / NotSpd / DimensionMismatch.
  void validate() const;
};

/// sum_n log sum_k pi_k N(y_n; mu_k, Q_k^{-1}).
double log_likelihood(const Dataset& data, const GmmParams& params);

struct EmConfig {
  double tol = 1e-8;  // relative log-likelihood improvement
  int max_iter = 500;
  int restarts = 3;
  double var_floor = 1e-6;  // relative to trace(data covariance) / d
};

struct EmResult {
  GmmParams params;
  double loglik = 0.0;
  int iterations = 0;
  int restart = 0;
  std::vector<double> loglik_trace;  // log-likelihood before each M-step, then final
};

EmResult em_fit(const Dataset& data, int k, std::uint64_t seed, const EmConfig& cfg);

}  // namespace korea
