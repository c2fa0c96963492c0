#pragma once

#include "korea/dataset.hpp"
#include "korea/densities.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace korea {

/// Conjugate prior: Dirichlet(alpha0, ..., alpha0) on the weights and
/// Gaussian-Wishart(m0, beta0, W0, nu0) on each component's (mean, precision).
struct Hyperparams {
  double alpha0 = 1.0;
  double beta0 = 1.0;
  Eigen::VectorXd m0;
  Eigen::MatrixXd W0;
  double nu0 = 0.0;

  /// alpha0 = 1, beta0 = 1, m0 = sample mean, nu0 = d + 2 and W0 chosen so
  /// that E[Q] = nu0 * W0 equals the inverse sample covariance.
  static Hyperparams data_driven(const Dataset& data);

  /// Throws InvalidArgument / DofTooSmall / NotSpd on a bad prior.
  void validate(Eigen::Index d) const;
};

/// Optional overrides layered on top of the data-driven defaults.
struct HyperOverrides {
  std::optional<double> alpha0;
  std::optional<double> beta0;
  std::optional<Eigen::VectorXd> m0;
  std::optional<Eigen::MatrixXd> W0;
  std::optional<double> nu0;

  Hyperparams resolve(const Dataset& data) const;
};

enum class InitStrategy { kmeans, random };

/// Factorized variational posterior q(z) q(pi) prod_k q(mu_k, Q_k).
struct VbState {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  std::vector<Eigen::VectorXd> m;
  std::vector<Eigen::MatrixXd> W;
  Eigen::VectorXd nu;
  Eigen::MatrixXd resp;  // N x K
  std::vector<double> elbo_trace;
  int iterations = 0;

  int components() const { return static_cast<int>(alpha.size()); }
};

struct VbFitConfig {
  double tol = 1e-8;  // relative ELBO improvement
  int max_iter = 500;
  int restarts = 3;
};

struct VbFitResult {
  VbState state;
  double elbo = 0.0;
  int restart = 0;  // index of the chosen restart
  std::vector<double> restart_elbos;  // NaN for restarts that failed
};

/// Responsibilities from the chosen strategy followed by a parameter update,
/// so the returned state is complete. Deterministic for a fixed seed.
VbState init_state(const Dataset& data, const Hyperparams& hyper, int k, std::uint64_t seed,
                   InitStrategy strategy);

/// Recomputes (alpha, beta, m, W, nu) from `state.resp`.
void update_parameters(const Dataset& data, const Hyperparams& hyper, VbState& state);

/// One coordinate-ascent sweep: responsibilities, then (alpha, beta, m, W, nu).
VbState vb_step(const Dataset& data, const Hyperparams& hyper, const VbState& state);

double elbo(const Dataset& data, const Hyperparams& hyper, const VbState& state);

/// Best-ELBO fit over `cfg.restarts` seeds seed, seed+1, ...; even restarts use
/// k-means++ initialization, odd restarts random responsibilities.
VbFitResult vb_fit(const Dataset& data, int k, const Hyperparams& hyper, std::uint64_t seed,
                   const VbFitConfig& cfg);

struct ModePoint {
  std::vector<int> z;  // 0-based component index per observation
  Eigen::VectorXd pi;
  std::vector<Eigen::VectorXd> mu;
  std::vector<Eigen::MatrixXd> Q;
  bool weight_mode_fallback = false;           // Dirichlet mean used
  std::vector<bool> precision_mode_fallback;   // Wishart mean used, per component

  std::vector<std::string> fallbacks() const;
};

ModePoint extract_mode(const VbState& state, const Hyperparams& hyper);

/// log q*(z*, x*) under the variational posterior.
double log_q_at_mode(const VbState& state, const ModePoint& mode);

/// log p(y | z*, x*) + log p(z* | x*) + log p(x*). Returns -inf when an
/// observation is assigned to a zero-weight component.
double log_joint_at_mode(const Dataset& data, const ModePoint& mode, const Hyperparams& hyper);

}  // namespace korea
