#include "korea/datagen.hpp"

#include "korea/errors.hpp"

#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/discrete_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <cmath>
#include <numbers>

namespace korea {

namespace {

/// log of a Gamma(shape, 1) draw; shapes below one use the
/// Gamma(a) = Gamma(a + 1) U^(1/a) boost so tiny draws do not underflow.
double log_gamma_draw(double shape, Rng& rng) {
  if (shape >= 1.0) {
    boost::random::gamma_distribution<double> g(shape, 1.0);
    return std::log(g(rng));
  }
  boost::random::gamma_distribution<double> g(shape + 1.0, 1.0);
  boost::random::uniform_01<double> u;
  double v = u(rng);
  while (v <= 0.0) v = u(rng);
  return std::log(g(rng)) + std::log(v) / shape;
}

}  // namespace

SimplexVector sample_dirichlet(const Eigen::VectorXd& alpha, Rng& rng) {
  if (alpha.size() == 0 || !alpha.allFinite() || (alpha.array() <= 0.0).any()) {
    throw Error(ErrorCode::NonPositiveAlpha, "Dirichlet concentrations must be positive");
  }
  Eigen::VectorXd logs(alpha.size());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) logs[k] = log_gamma_draw(alpha[k], rng);
  Eigen::VectorXd w = (logs.array() - logs.maxCoeff()).exp();
  w /= w.sum();
  return SimplexVector(std::move(w));
}

SimplexVector sample_dirichlet(const Eigen::VectorXd& alpha, std::uint64_t seed) {
  Rng rng(seed);
  return sample_dirichlet(alpha, rng);
}

SpdMatrix sample_wishart(const SpdMatrix& scale, double dof, Rng& rng) {
  const auto d = scale.dim();
  if (!(dof > static_cast<double>(d) - 1.0)) {
    throw Error(ErrorCode::DofTooSmall, "Wishart dof must exceed d - 1");
  }
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    boost::random::chi_squared_distribution<double> chi2(dof - static_cast<double>(i));
    a(i, i) = std::sqrt(chi2(rng));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = normal(rng);
  }
  const Eigen::MatrixXd la = scale.lower() * a;
  return SpdMatrix(la * la.transpose());
}

SpdMatrix sample_wishart(const SpdMatrix& scale, double dof, std::uint64_t seed) {
  Rng rng(seed);
  return sample_wishart(scale, dof, rng);
}

void SynthConfig::validate() const {
  if (k_hat < 1 || n < 1) throw Error(ErrorCode::InvalidArgument, "k_hat and n must be at least 1");
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  if (!(wishart_dof > 1.0)) throw Error(ErrorCode::DofTooSmall, "wishart_dof must exceed d - 1 = 1");
  if (dirichlet_alpha && !(*dirichlet_alpha > 0.0)) {
    throw Error(ErrorCode::NonPositiveAlpha, "dirichlet_alpha must be positive");
  }
  if (!(min_weight >= 0.0) || min_weight * k_hat > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "min_weight must lie in [0, 1 / k_hat]");
  }
}

LabeledDataset sample_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  constexpr Eigen::Index d = 2;
  const int k_hat = cfg.k_hat;
  Rng rng(cfg.seed);

  LabeledDataset out;
  auto& truth = out.true_params;
  std::vector<SpdMatrix> covariances;
  const auto identity = SpdMatrix::identity(d);
  for (int j = 1; j <= k_hat; ++j) {
    const double angle = 2.0 * std::numbers::pi / k_hat * j;
    truth.means.emplace_back(Eigen::Vector2d(cfg.radius * std::cos(angle), cfg.radius * std::sin(angle)));
    const SpdMatrix draw = sample_wishart(identity, cfg.wishart_dof, rng);
    if (cfg.wishart_draws_covariance) {
      covariances.push_back(draw);
      truth.precisions.push_back(draw.inverse());
    } else {
      covariances.emplace_back(draw.inverse());
      truth.precisions.push_back(draw.matrix());
    }
  }

  const double conc = cfg.dirichlet_alpha.value_or(1.0 / k_hat);
  const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(k_hat, conc);
  Eigen::VectorXd weights = sample_dirichlet(alpha, rng).weights();
  if (cfg.min_weight > 0.0) {
    while (weights.minCoeff() < cfg.min_weight) {
      if (++out.weight_redraws > kMaxWeightRedraws) {
        throw Error(ErrorCode::RejectionBudgetExceeded, "no weight draw met min_weight after 10^4 redraws");
      }
      weights = sample_dirichlet(alpha, rng).weights();
    }
  }
  truth.weights = weights;

  boost::random::discrete_distribution<int, double> pick_label(weights.data(), weights.data() + weights.size());
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd y(cfg.n, d);
  out.labels.resize(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    const int label = pick_label(rng);
    out.labels[static_cast<std::size_t>(i)] = label;
    Eigen::Vector2d z(normal(rng), normal(rng));
    const auto ul = static_cast<std::size_t>(label);
    y.row(i) = (truth.means[ul] + covariances[ul].lower() * z).transpose();
  }
  out.data = Dataset(std::move(y));
  return out;
}

}  // namespace korea
