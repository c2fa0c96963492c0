#include "korea/model_select.hpp"

#include "korea/errors.hpp"
#include "korea/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace korea {

double log_prior_k(int k, int k_max) {
  if (k_max < 1 || k < 1 || k > k_max) {
    throw Error(ErrorCode::OutOfRange, "K = " + std::to_string(k) + " outside 1.." + std::to_string(k_max));
  }
  Eigen::VectorXd exponents(k_max);
  for (int j = 1; j <= k_max; ++j) exponents[j - 1] = -static_cast<double>(j);
  return -static_cast<double>(k) - log_sum_exp(exponents);
}

KoreaScore korea_score_from_state(const Dataset& data, const VbState& state, const Hyperparams& hyper, int k_max) {
  const auto mode = extract_mode(state, hyper);
  KoreaScore s;
  s.k = state.components();
  s.log_joint = log_joint_at_mode(data, mode, hyper);
  s.log_prior = log_prior_k(s.k, k_max);
  s.log_q = log_q_at_mode(state, mode);
  s.log_score = s.log_joint + s.log_prior - s.log_q;
  s.iterations = state.iterations;
  s.elbo = state.elbo_trace.empty() ? elbo(data, hyper, state) : state.elbo_trace.back();
  s.fallbacks = mode.fallbacks();
  return s;
}

KoreaScore korea_score(const Dataset& data, int k, const Hyperparams& hyper, const VbFitConfig& cfg,
                       std::uint64_t seed, int k_max) {
  const auto fit = vb_fit(data, k, hyper, seed, cfg);
  auto s = korea_score_from_state(data, fit.state, hyper, k_max);
  s.elbo = fit.elbo;
  s.restart = fit.restart;
  return s;
}

double korea_log_score(const Dataset& data, int k, const Hyperparams& hyper, const VbFitConfig& cfg,
                       std::uint64_t seed, int k_max) {
  return korea_score(data, k, hyper, cfg, seed, k_max).log_score;
}

ModelOrderPosterior model_order_posterior(const Dataset& data, int k_max, const FitSettings& settings) {
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be at least 1");
  if (data.size() < 1) throw Error(ErrorCode::TooFewPoints, "empty dataset");
  const Hyperparams hyper = settings.hyper.resolve(data);
  const int k_eff = static_cast<int>(std::min<Eigen::Index>(k_max, data.size()));

  ModelOrderPosterior post;
  post.k_max_requested = k_max;
  post.diagnostics.resize(static_cast<std::size_t>(k_eff));
  parallel_for(static_cast<std::size_t>(k_eff), settings.jobs, [&](std::size_t i) {
    post.diagnostics[i] = korea_score(data, static_cast<int>(i) + 1, hyper, settings.vb, settings.seed, k_eff);
  });

  Eigen::VectorXd scores(k_eff);
  for (int k = 1; k <= k_eff; ++k) {
    post.k_values.push_back(k);
    post.log_scores.push_back(post.diagnostics[static_cast<std::size_t>(k - 1)].log_score);
    scores[k - 1] = post.log_scores.back();
  }
  const double norm = log_sum_exp(scores);
  for (int k = 0; k < k_eff; ++k) post.probs.push_back(std::exp(scores[k] - norm));
  post.k_star = 1 + static_cast<int>(std::max_element(post.probs.begin(), post.probs.end()) - post.probs.begin());
  return post;
}

HillClimbResult hill_climb_order(const Dataset& data, int k_max, int k_init, const FitSettings& settings) {
  if (k_init < 1 || k_init > k_max) {
    throw Error(ErrorCode::OutOfRange, "k_init " + std::to_string(k_init) + " outside 1.." + std::to_string(k_max));
  }
  const Hyperparams hyper = settings.hyper.resolve(data);
  const int k_eff = static_cast<int>(std::min<Eigen::Index>(k_max, data.size()));
  std::map<int, double> cache;
  auto score = [&](int k) {
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    const double v = korea_log_score(data, k, hyper, settings.vb, settings.seed, k_eff);
    cache.emplace(k, v);
    return v;
  };

  int current = std::min(k_init, k_eff);
  double current_score = score(current);
  for (;;) {
    int best = current;
    double best_score = current_score;
    for (int k : {current - 1, current + 1}) {
      if (k < 1 || k > k_eff) continue;
      const double v = score(k);
      if (v > best_score) {
        best = k;
        best_score = v;
      }
    }
    if (best == current) break;
    current = best;
    current_score = best_score;
  }

  HillClimbResult out;
  out.k_star = current;
  for (const auto& [k, v] : cache) out.visited.push_back(k);
  return out;
}

long count_free_params(int k, int d) {
  if (k < 1 || d < 1) throw Error(ErrorCode::InvalidArgument, "K and d must be positive");
  const long kl = k, dl = d;
  return (kl - 1) + kl * dl + kl * dl * (dl + 1) / 2;
}

double aic(double loglik, long params) { return 2.0 * static_cast<double>(params) - 2.0 * loglik; }

double bic(double loglik, long params, long n) {
  return static_cast<double>(params) * std::log(static_cast<double>(n)) - 2.0 * loglik;
}

CriterionCurve aic_bic_curve(const Dataset& data, int k_max, const EmConfig& cfg, std::uint64_t seed, int jobs) {
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be at least 1");
  const int k_eff = static_cast<int>(std::min<Eigen::Index>(k_max, data.size() - 1));
  if (k_eff < 1) throw Error(ErrorCode::TooFewPoints, "EM needs more observations than components");

  CriterionCurve curve;
  curve.rows.resize(static_cast<std::size_t>(k_eff));
  const int d = static_cast<int>(data.dim());
  parallel_for(static_cast<std::size_t>(k_eff), jobs, [&](std::size_t i) {
    const int k = static_cast<int>(i) + 1;
    const auto fit = em_fit(data, k, seed, cfg);
    auto& row = curve.rows[i];
    row.k = k;
    row.loglik = fit.loglik;
    row.params = count_free_params(k, d);
    row.aic = aic(row.loglik, row.params);
    row.bic = bic(row.loglik, row.params, static_cast<long>(data.size()));
  });

  auto argmin = [&](auto field) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.rows.size(); ++i) {
      if (field(curve.rows[i]) < field(curve.rows[best])) best = i;
    }
    return curve.rows[best].k;
  };
  curve.aic_k_star = argmin([](const CriterionRow& r) { return r.aic; });
  curve.bic_k_star = argmin([](const CriterionRow& r) { return r.bic; });
  return curve;
}

}  // namespace korea
