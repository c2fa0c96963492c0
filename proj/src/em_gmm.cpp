#include "korea/em_gmm.hpp"

#include "korea/errors.hpp"
#include "korea/kmeans.hpp"
#include "korea/rng.hpp"

#include <cmath>
#include <string>

namespace korea {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

/// N x K matrix of log pi_k + log N(y_n | k).
Eigen::MatrixXd weighted_log_densities(const Dataset& data, const GmmParams& p) {
  const auto d = static_cast<double>(data.dim());
  const auto& x = data.values();
  Eigen::MatrixXd out(data.size(), p.components());
  for (int k = 0; k < p.components(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const SpdMatrix q(p.precisions[uk]);
    const Eigen::MatrixXd proj = (x.rowwise() - p.means[uk].transpose()) * q.lower();
    const double log_w = p.weights[k] > 0.0 ? std::log(p.weights[k]) : kNegInf;
    out.col(k) = (log_w + 0.5 * q.logdet() - 0.5 * d * kLog2Pi) - 0.5 * proj.rowwise().squaredNorm().array();
  }
  return out;
}

/// Log-likelihood and (optionally) responsibilities.
double e_step(const Dataset& data, const GmmParams& p, Eigen::MatrixXd* resp) {
  const Eigen::MatrixXd lw = weighted_log_densities(data, p);
  if (resp) resp->resize(lw.rows(), lw.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < lw.rows(); ++i) {
    const double lse = log_sum_exp(lw.row(i).transpose());
    total += lse;
    if (resp) resp->row(i) = (lw.row(i).array() - lse).exp();
  }
  return total;
}

Eigen::MatrixXd floored_precision(const Eigen::MatrixXd& cov, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (cov + cov.transpose()));
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::NotSpd, "eigen-decomposition of covariance failed");
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(floor);
  Eigen::MatrixXd prec = eig.eigenvectors() * lam.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (prec + prec.transpose());
}

void m_step(const Dataset& data, const Eigen::MatrixXd& resp, double floor, const Eigen::MatrixXd& data_cov,
            GmmParams& p) {
  const auto& x = data.values();
  const auto n = static_cast<double>(data.size());
  for (int k = 0; k < p.components(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const auto r = resp.col(k);
    const double nk = r.sum();
    p.weights[k] = nk / n;
    if (nk <= 1e-12 * n) {
      // Empty component: its parameters do not affect the likelihood.
      p.precisions[uk] = floored_precision(data_cov, floor);
      continue;
    }
    p.means[uk] = (x.transpose() * r) / nk;
    const Eigen::MatrixXd centered = x.rowwise() - p.means[uk].transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * r.asDiagonal() * centered) / nk;
    p.precisions[uk] = floored_precision(cov, floor);
  }
  p.weights /= p.weights.sum();
}

}  // namespace

void GmmParams::validate() const {
  const auto k = weights.size();
  if (k < 1 || static_cast<Eigen::Index>(means.size()) != k || static_cast<Eigen::Index>(precisions.size()) != k) {
    throw Error(ErrorCode::DimensionMismatch, "GMM parameter arrays disagree on K");
  }
  SimplexVector check(weights);
  for (std::size_t j = 0; j < means.size(); ++j) {
    if (means[j].size() != dim() || precisions[j].rows() != dim()) {
      throw Error(ErrorCode::DimensionMismatch, "GMM component dimensions disagree");
    }
    SpdMatrix spd(precisions[j]);
  }
}

double log_likelihood(const Dataset& data, const GmmParams& params) {
  if (params.dim() != data.dim()) throw Error(ErrorCode::DimensionMismatch, "model and data dimensions differ");
  return e_step(data, params, nullptr);
}

EmResult em_fit(const Dataset& data, int k, std::uint64_t seed, const EmConfig& cfg) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
  if (data.size() <= k) {
    throw Error(ErrorCode::TooFewPoints, std::to_string(data.size()) + " observations for K = " + std::to_string(k));
  }
  if (!(cfg.var_floor > 0.0) || !(cfg.tol > 0.0) || cfg.max_iter < 1 || cfg.restarts < 1) {
    throw Error(ErrorCode::InvalidArgument, "em_fit requires var_floor > 0, tol > 0, max_iter >= 1, restarts >= 1");
  }

  const auto d = data.dim();
  const Eigen::MatrixXd data_cov = data.covariance();
  const double avg_var = data_cov.trace() / static_cast<double>(d);
  const double floor = cfg.var_floor * (avg_var > 0.0 ? avg_var : 1.0);

  EmResult best;
  bool have_best = false;
  std::string last_failure;
  for (int r = 0; r < cfg.restarts; ++r) {
    try {
      Rng rng(seed + static_cast<std::uint64_t>(r));
      const auto km = kmeans_pp(data, k, rng);
      GmmParams p;
      p.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
      const Eigen::MatrixXd shared = floored_precision(data_cov, floor);
      for (int c = 0; c < k; ++c) {
        p.means.emplace_back(km.centers.row(c).transpose());
        p.precisions.push_back(shared);
      }

      EmResult run;
      Eigen::MatrixXd resp;
      double ll = e_step(data, p, &resp);
      run.loglik_trace.push_back(ll);
      int it = 0;
      for (; it < cfg.max_iter; ++it) {
        m_step(data, resp, floor, data_cov, p);
        const double next = e_step(data, p, &resp);
        run.loglik_trace.push_back(next);
        const double gain = next - ll;
        ll = next;
        if (gain < cfg.tol * std::abs(ll)) {
          ++it;
          break;
        }
      }
      if (!std::isfinite(ll)) throw Error(ErrorCode::NotSpd, "non-finite log-likelihood");
      run.params = std::move(p);
      run.loglik = ll;
      run.iterations = it;
      run.restart = r;
      if (!have_best || run.loglik > best.loglik) {
        best = std::move(run);
        have_best = true;
      }
    } catch (const Error& err) {
      if (err.code() != ErrorCode::NotSpd) throw;
      last_failure = err.what();
    }
  }
  if (!have_best) throw Error(ErrorCode::AllRestartsFailed, "every EM restart failed: " + last_failure);
  return best;
}

}  // namespace korea
