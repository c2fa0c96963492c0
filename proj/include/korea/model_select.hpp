#pragma once

#include "korea/dataset.hpp"
#include "korea/em_gmm.hpp"
#include "korea/vb_gmm.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace korea {

/// log p(K) for the truncated exponential prior exp(-K) on 1..k_max.
double log_prior_k(int k, int k_max);

struct FitSettings {
  HyperOverrides hyper;  // resolved against each dataset
  VbFitConfig vb;
  std::uint64_t seed = 1;
  int jobs = 1;  // per-K evaluations run on this many threads
};

/// The three terms of the log score for one K, plus the fit they came from.
struct KoreaScore {
  int k = 0;
  double log_score = 0.0;
  double log_joint = 0.0;
  double log_prior = 0.0;
  double log_q = 0.0;
  double elbo = 0.0;
  int iterations = 0;
  int restart = 0;
  std::vector<std::string> fallbacks;
};

/// log p(y, z*, x*, K) - log q*(z*, x*) at the mode of the best-ELBO VB fit.
KoreaScore korea_score(const Dataset& data, int k, const Hyperparams& hyper, const VbFitConfig& cfg,
                       std::uint64_t seed, int k_max);

double korea_log_score(const Dataset& data, int k, const Hyperparams& hyper, const VbFitConfig& cfg,
                       std::uint64_t seed, int k_max);

/// Score given an already-fitted state (used by the invariance checks).
KoreaScore korea_score_from_state(const Dataset& data, const VbState& state, const Hyperparams& hyper, int k_max);

struct ModelOrderPosterior {
  std::vector<int> k_values;
  std::vector<double> log_scores;
  std::vector<double> probs;
  int k_star = 0;
  int k_max_requested = 0;  // differs from k_values.size() when capped at N
  std::vector<KoreaScore> diagnostics;
};

/// Enumerates K = 1..k_max (capped at N) and normalizes the scores.
ModelOrderPosterior model_order_posterior(const Dataset& data, int k_max, const FitSettings& settings);

struct HillClimbResult {
  int k_star = 0;
  std::vector<int> visited;  // ascending
};

/// Greedy integer ascent on the score starting from k_init; each K is
/// scored at most once.
HillClimbResult hill_climb_order(const Dataset& data, int k_max, int k_init, const FitSettings& settings);

/// (K - 1) weights + K d means + K d (d + 1) / 2 covariance entries.
long count_free_params(int k, int d);

struct CriterionRow {
  int k = 0;
  double loglik = 0.0;
  long params = 0;
  double aic = 0.0;
  double bic = 0.0;
};

struct CriterionCurve {
  std::vector<CriterionRow> rows;
  int aic_k_star = 0;
  int bic_k_star = 0;
};

double aic(double loglik, long params);
double bic(double loglik, long params, long n);

/// EM fits for K = 1..k_max (capped so that N > K) and the two criteria.
CriterionCurve aic_bic_curve(const Dataset& data, int k_max, const EmConfig& cfg, std::uint64_t seed, int jobs = 1);

}  // namespace korea
