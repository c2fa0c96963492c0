#include "korea/vb_gmm.hpp"

#include "korea/errors.hpp"
#include "korea/kmeans.hpp"
#include "korea/rng.hpp"

#include <boost/random/uniform_real_distribution.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace korea {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

/// Per-component expectations shared by the E-step and the ELBO.
struct Expectations {
  Eigen::VectorXd log_pi;   // E[log pi_k]
  Eigen::VectorXd log_lam;  // E[log |Q_k|]
  Eigen::MatrixXd quad;     // N x K, (x_n - m_k)^T W_k (x_n - m_k)
  std::vector<SpdMatrix> W;
};

Expectations expectations(const Dataset& data, const VbState& s) {
  const int k_count = s.components();
  const auto d = data.dim();
  const auto& x = data.values();
  Expectations e;
  e.log_pi.resize(k_count);
  e.log_lam.resize(k_count);
  e.quad.resize(data.size(), k_count);
  e.W.reserve(static_cast<std::size_t>(k_count));

  const double psi_total = digamma(s.alpha.sum());
  for (int k = 0; k < k_count; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    e.W.emplace_back(s.W[uk]);
    const auto& w = e.W.back();
    e.log_pi[k] = digamma(s.alpha[k]) - psi_total;
    double ll = static_cast<double>(d) * std::numbers::ln2 + w.logdet();
    for (Eigen::Index i = 1; i <= d; ++i) ll += digamma(0.5 * (s.nu[k] + 1.0 - static_cast<double>(i)));
    e.log_lam[k] = ll;
    const Eigen::MatrixXd proj = (x.rowwise() - s.m[uk].transpose()) * w.lower();
    e.quad.col(k) = proj.rowwise().squaredNorm();
  }
  return e;
}

void check_state_shape(const Dataset& data, const VbState& s) {
  const auto k = s.alpha.size();
  if (k < 1 || s.beta.size() != k || s.nu.size() != k || static_cast<Eigen::Index>(s.m.size()) != k ||
      static_cast<Eigen::Index>(s.W.size()) != k || s.resp.rows() != data.size() || s.resp.cols() != k) {
    throw Error(ErrorCode::DimensionMismatch, "VB state does not match data and K");
  }
}


}  // namespace

void update_parameters(const Dataset& data, const Hyperparams& h, VbState& s) {
  const int k_count = static_cast<int>(s.resp.cols());
  const auto& x = data.values();
  const Eigen::MatrixXd w0_inv = SpdMatrix(h.W0).inverse();

  s.alpha.resize(k_count);
  s.beta.resize(k_count);
  s.nu.resize(k_count);
  s.m.assign(static_cast<std::size_t>(k_count), Eigen::VectorXd());
  s.W.assign(static_cast<std::size_t>(k_count), Eigen::MatrixXd());

  for (int k = 0; k < k_count; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const auto r = s.resp.col(k);
    const double nk = r.sum();
    s.alpha[k] = h.alpha0 + nk;
    s.beta[k] = h.beta0 + nk;
    s.nu[k] = h.nu0 + nk;

    Eigen::MatrixXd w_inv = w0_inv;
    if (nk > 0.0) {
      const Eigen::VectorXd xbar = (x.transpose() * r) / nk;
      const Eigen::MatrixXd centered = x.rowwise() - xbar.transpose();
      w_inv += centered.transpose() * r.asDiagonal() * centered;
      const Eigen::VectorXd dm = xbar - h.m0;
      w_inv += (h.beta0 * nk / (h.beta0 + nk)) * dm * dm.transpose();
      s.m[uk] = (h.beta0 * h.m0 + nk * xbar) / s.beta[k];
    } else {
      s.m[uk] = h.m0;
    }
    s.W[uk] = SpdMatrix(0.5 * (w_inv + w_inv.transpose())).inverse();
  }
}

Hyperparams Hyperparams::data_driven(const Dataset& data) {
  const auto d = data.dim();
  Hyperparams h;
  h.m0 = data.mean();
  h.nu0 = static_cast<double>(d) + 2.0;
  Eigen::MatrixXd cov = data.covariance();
  const double avg_var = cov.trace() / static_cast<double>(d);
  try {
    h.W0 = SpdMatrix(cov).inverse() / h.nu0;
  } catch (const Error&) {
    // Degenerate sample (e.g. repeated points): isotropic prior at the average scale.
    const double scale = avg_var > 0.0 ? avg_var : 1.0;
    h.W0 = Eigen::MatrixXd::Identity(d, d) / (scale * h.nu0);
  }
  return h;
}

void Hyperparams::validate(Eigen::Index d) const {
  if (!(alpha0 > 0.0) || !(beta0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha0 and beta0 must be positive");
  if (m0.size() != d || W0.rows() != d || W0.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch, "hyperparameter dimensions do not match data");
  }
  if (!(nu0 > static_cast<double>(d) - 1.0)) throw Error(ErrorCode::DofTooSmall, "nu0 must exceed d - 1");
  SpdMatrix check(W0);
}

Hyperparams HyperOverrides::resolve(const Dataset& data) const {
  Hyperparams h = Hyperparams::data_driven(data);
  if (alpha0) h.alpha0 = *alpha0;
  if (beta0) h.beta0 = *beta0;
  if (m0) h.m0 = *m0;
  if (nu0) {
    // Keep E[Q] fixed when only the dof is overridden.
    if (!W0) h.W0 *= h.nu0 / *nu0;
    h.nu0 = *nu0;
  }
  if (W0) h.W0 = *W0;
  h.validate(data.dim());
  return h;
}

VbState init_state(const Dataset& data, const Hyperparams& hyper, int k, std::uint64_t seed,
                   InitStrategy strategy) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
  if (data.size() < k) {
    throw Error(ErrorCode::TooFewPoints,
                std::to_string(data.size()) + " observations for K = " + std::to_string(k));
  }
  hyper.validate(data.dim());

  const auto n = data.size();
  VbState s;
  s.resp.resize(n, k);
  Rng rng(seed);
  if (k == 1) {
    s.resp.setOnes();
  } else if (strategy == InitStrategy::kmeans) {
    const auto km = kmeans_pp(data, k, rng);
    s.resp.setConstant(0.1 / static_cast<double>(k - 1));
    for (Eigen::Index i = 0; i < n; ++i) s.resp(i, km.assignment[static_cast<std::size_t>(i)]) = 0.9;
  } else {
    boost::random::uniform_real_distribution<double> unif(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int c = 0; c < k; ++c) s.resp(i, c) = unif(rng) + 1e-3;
      s.resp.row(i) /= s.resp.row(i).sum();
    }
  }
  update_parameters(data, hyper, s);
  return s;
}

VbState vb_step(const Dataset& data, const Hyperparams& hyper, const VbState& state) {
  check_state_shape(data, state);
  const int k_count = state.components();
  const auto d = static_cast<double>(data.dim());
  const auto e = expectations(data, state);

  VbState next = state;
  Eigen::MatrixXd log_rho(data.size(), k_count);
  for (int k = 0; k < k_count; ++k) {
    log_rho.col(k) = (e.log_pi[k] + 0.5 * e.log_lam[k] - 0.5 * d * kLog2Pi - 0.5 * d / state.beta[k]) -
                     0.5 * state.nu[k] * e.quad.col(k).array();
  }
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double hi = log_rho.row(i).maxCoeff();
    Eigen::RowVectorXd row = (log_rho.row(i).array() - hi).exp();
    next.resp.row(i) = row / row.sum();
  }
  update_parameters(data, hyper, next);
  next.iterations = state.iterations + 1;
  return next;
}

double elbo(const Dataset& data, const Hyperparams& h, const VbState& s) {
  check_state_shape(data, s);
  const int k_count = s.components();
  const auto d = static_cast<double>(data.dim());
  const int di = static_cast<int>(data.dim());
  const auto e = expectations(data, s);
  const SpdMatrix w0(h.W0);

  auto log_b = [&](double logdet_w, double nu) {
    return -0.5 * nu * logdet_w - 0.5 * nu * d * std::numbers::ln2 - log_multigamma(0.5 * nu, di);
  };
  auto log_c = [](const Eigen::VectorXd& a) {
    double out = log_gamma(a.sum());
    for (Eigen::Index k = 0; k < a.size(); ++k) out -= log_gamma(a[k]);
    return out;
  };

  const Eigen::VectorXd nk = s.resp.colwise().sum().transpose();
  double lik = 0.0, p_z = 0.0, p_mu_lam = 0.0, q_mu_lam = 0.0;
  for (int k = 0; k < k_count; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const double weighted_quad = s.resp.col(k).dot(e.quad.col(k));
    lik += 0.5 * (nk[k] * (e.log_lam[k] - d / s.beta[k] - d * kLog2Pi) - s.nu[k] * weighted_quad);
    p_z += nk[k] * e.log_pi[k];

    const Eigen::VectorXd dm = s.m[uk] - h.m0;
    p_mu_lam += 0.5 * (d * std::log(h.beta0 / (2.0 * std::numbers::pi)) + e.log_lam[k] - d * h.beta0 / s.beta[k] -
                       h.beta0 * s.nu[k] * e.W[uk].quadratic_form(dm));
    p_mu_lam += log_b(w0.logdet(), h.nu0) + 0.5 * (h.nu0 - d - 1.0) * e.log_lam[k] -
                0.5 * s.nu[k] * w0.trace_inverse_times(s.W[uk]);

    const double entropy_lam =
        -log_b(e.W[uk].logdet(), s.nu[k]) - 0.5 * (s.nu[k] - d - 1.0) * e.log_lam[k] + 0.5 * s.nu[k] * d;
    q_mu_lam += 0.5 * e.log_lam[k] + 0.5 * d * std::log(s.beta[k] / (2.0 * std::numbers::pi)) - 0.5 * d -
                entropy_lam;
  }

  const double p_pi = log_c(Eigen::VectorXd::Constant(k_count, h.alpha0)) + (h.alpha0 - 1.0) * e.log_pi.sum();
  const double q_pi = (s.alpha.array() - 1.0).matrix().dot(e.log_pi) + log_c(s.alpha);
  double q_z = 0.0;
  for (Eigen::Index i = 0; i < s.resp.size(); ++i) {
    const double r = s.resp.data()[i];
    if (r > 0.0) q_z += r * std::log(r);
  }
  return lik + p_z + p_pi + p_mu_lam - q_z - q_pi - q_mu_lam;
}

VbFitResult vb_fit(const Dataset& data, int k, const Hyperparams& hyper, std::uint64_t seed,
                   const VbFitConfig& cfg) {
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1 || cfg.restarts < 1) {
    throw Error(ErrorCode::InvalidArgument, "vb_fit requires tol > 0, max_iter >= 1, restarts >= 1");
  }
  VbFitResult best;
  bool have_best = false;
  std::string last_failure;
  for (int r = 0; r < cfg.restarts; ++r) {
    const auto strategy = (r % 2 == 0) ? InitStrategy::kmeans : InitStrategy::random;
    try {
      VbState s = init_state(data, hyper, k, seed + static_cast<std::uint64_t>(r), strategy);
      double current = elbo(data, hyper, s);
      s.elbo_trace.push_back(current);
      for (int it = 0; it < cfg.max_iter; ++it) {
        VbState next = vb_step(data, hyper, s);
        const double value = elbo(data, hyper, next);
        next.elbo_trace.push_back(value);
        s = std::move(next);
        const double gain = value - current;
        current = value;
        if (gain < cfg.tol * std::abs(current)) break;
      }
      best.restart_elbos.push_back(current);
      if (!have_best || current > best.elbo) {
        best.state = std::move(s);
        best.elbo = current;
        best.restart = r;
        have_best = true;
      }
    } catch (const Error& err) {
      if (err.code() != ErrorCode::NotSpd) throw;
      last_failure = err.what();
      best.restart_elbos.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  if (!have_best) throw Error(ErrorCode::AllRestartsFailed, "every VB restart failed: " + last_failure);
  return best;
}

std::vector<std::string> ModePoint::fallbacks() const {
  std::vector<std::string> out;
  if (weight_mode_fallback) out.emplace_back("weights:dirichlet_mean");
  for (std::size_t k = 0; k < precision_mode_fallback.size(); ++k) {
    if (precision_mode_fallback[k]) out.push_back("precision[" + std::to_string(k + 1) + "]:wishart_mean");
  }
  return out;
}

ModePoint extract_mode(const VbState& state, const Hyperparams& hyper) {
  (void)hyper;
  const int k_count = state.components();
  const auto d = static_cast<double>(state.m.empty() ? 0 : state.m.front().size());
  ModePoint mode;
  mode.z.resize(static_cast<std::size_t>(state.resp.rows()));
  for (Eigen::Index i = 0; i < state.resp.rows(); ++i) {
    Eigen::Index arg = 0;
    state.resp.row(i).maxCoeff(&arg);  // first maximum wins ties
    mode.z[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }

  const double total = state.alpha.sum();
  if ((state.alpha.array() > 1.0).all()) {
    mode.pi = (state.alpha.array() - 1.0) / (total - static_cast<double>(k_count));
  } else {
    mode.pi = state.alpha / total;
    mode.weight_mode_fallback = true;
  }

  mode.mu = state.m;
  mode.Q.resize(static_cast<std::size_t>(k_count));
  mode.precision_mode_fallback.assign(static_cast<std::size_t>(k_count), false);
  for (int k = 0; k < k_count; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    // At nu = d + 1 the mode is the zero matrix, so the mean is used there too.
    if (state.nu[k] > d + 1.0) {
      mode.Q[uk] = (state.nu[k] - d - 1.0) * state.W[uk];
    } else {
      mode.Q[uk] = state.nu[k] * state.W[uk];
      mode.precision_mode_fallback[uk] = true;
    }
  }
  return mode;
}

double log_q_at_mode(const VbState& state, const ModePoint& mode) {
  const int k_count = state.components();
  double out = 0.0;
  for (std::size_t i = 0; i < mode.z.size(); ++i) {
    out += std::log(state.resp(static_cast<Eigen::Index>(i), mode.z[i]));
  }
  out += log_dirichlet_pdf(SimplexVector(mode.pi), state.alpha);
  for (int k = 0; k < k_count; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const SpdMatrix q(mode.Q[uk]);
    out += log_mvn_pdf(mode.mu[uk], state.m[uk], SpdMatrix(state.beta[k] * q.matrix()));
    out += log_wishart_pdf(q, SpdMatrix(state.W[uk]), state.nu[k]);
  }
  return out;
}

double log_joint_at_mode(const Dataset& data, const ModePoint& mode, const Hyperparams& hyper) {
  const auto k_count = static_cast<Eigen::Index>(mode.Q.size());
  if (static_cast<Eigen::Index>(mode.z.size()) != data.size()) {
    throw Error(ErrorCode::DimensionMismatch, "mode assignment length differs from data size");
  }
  std::vector<SpdMatrix> q;
  q.reserve(static_cast<std::size_t>(k_count));
  for (const auto& m : mode.Q) q.emplace_back(m);

  double out = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const auto z = static_cast<std::size_t>(mode.z[static_cast<std::size_t>(i)]);
    const double w = mode.pi[static_cast<Eigen::Index>(z)];
    if (w <= 0.0) return kNegInf;
    out += log_mvn_pdf(data.row(i).transpose(), mode.mu[z], q[z]) + std::log(w);
  }
  out += log_dirichlet_pdf(SimplexVector(mode.pi), Eigen::VectorXd::Constant(k_count, hyper.alpha0));
  const SpdMatrix w0(hyper.W0);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    out += log_mvn_pdf(mode.mu[uk], hyper.m0, SpdMatrix(hyper.beta0 * q[uk].matrix()));
    out += log_wishart_pdf(q[uk], w0, hyper.nu0);
  }
  return out;
}

}  // namespace korea
