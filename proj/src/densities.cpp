#include "korea/densities.hpp"

#include "korea/errors.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace korea {

namespace {

void require_square(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected a non-empty square matrix, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
}

}  // namespace

SpdFactor spd_factor_logdet(const Eigen::MatrixXd& m) {
  require_square(m);
  if (!m.allFinite()) throw Error(ErrorCode::NotSpd, "matrix has non-finite entries");

  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    throw Error(ErrorCode::NotSymmetric, "relative asymmetry " + std::to_string(asym / scale));
  }

  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::NotSpd, "non-positive pivot in Cholesky factorization");

  SpdFactor out;
  out.lower = llt.matrixL();
  const auto diag = out.lower.diagonal();
  if ((diag.array() <= 0.0).any() || !diag.allFinite()) {
    throw Error(ErrorCode::NotSpd, "non-positive pivot in Cholesky factorization");
  }
  out.logdet = 2.0 * diag.array().log().sum();
  return out;
}

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& m) : factor_(spd_factor_logdet(m)) {
  matrix_ = 0.5 * (m + m.transpose());
}

Eigen::MatrixXd SpdMatrix::inverse() const {
  const auto d = dim();
  Eigen::MatrixXd linv = factor_.lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::MatrixXd inv = linv.transpose() * linv;
  return 0.5 * (inv + inv.transpose());
}

double SpdMatrix::quadratic_form(const Eigen::VectorXd& x) const {
  return (factor_.lower.transpose() * x).squaredNorm();
}

double SpdMatrix::trace_inverse_times(const Eigen::MatrixXd& x) const {
  const auto& l = factor_.lower;
  Eigen::MatrixXd y = l.triangularView<Eigen::Lower>().solve(x);
  y = l.triangularView<Eigen::Lower>().transpose().solve(y);
  return y.trace();
}

SimplexVector::SimplexVector(Eigen::VectorXd weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) throw Error(ErrorCode::NotSimplex, "empty weight vector");
  if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
    throw Error(ErrorCode::NotSimplex, "weights must be finite and non-negative");
  }
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw Error(ErrorCode::NotSimplex, "weights sum to " + std::to_string(total));
  }
}

double log_gamma(double x) { return boost::math::lgamma(x); }

double digamma(double x) { return boost::math::digamma(x); }

double log_multigamma(double a, int d) {
  double out = 0.25 * d * (d - 1) * std::log(std::numbers::pi);
  for (int j = 1; j <= d; ++j) out += log_gamma(a + 0.5 * (1 - j));
  return out;
}

double log_mvn_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const SpdMatrix& precision) {
  const auto d = precision.dim();
  if (x.size() != d || mean.size() != d) {
    throw Error(ErrorCode::DimensionMismatch, "log_mvn_pdf: vector and precision dimensions differ");
  }
  const Eigen::VectorXd diff = x - mean;
  return 0.5 * precision.logdet() - 0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) -
         0.5 * precision.quadratic_form(diff);
}

double log_wishart_pdf(const SpdMatrix& x, const SpdMatrix& scale, double dof) {
  const auto d = static_cast<double>(scale.dim());
  if (x.dim() != scale.dim()) throw Error(ErrorCode::DimensionMismatch, "log_wishart_pdf: x and scale differ");
  if (!(dof > d - 1.0)) {
    throw Error(ErrorCode::DofTooSmall, "dof " + std::to_string(dof) + " must exceed d - 1");
  }
  return 0.5 * (dof - d - 1.0) * x.logdet() - 0.5 * scale.trace_inverse_times(x.matrix()) -
         0.5 * dof * d * std::numbers::ln2 - 0.5 * dof * scale.logdet() -
         log_multigamma(0.5 * dof, static_cast<int>(scale.dim()));
}

double log_dirichlet_pdf(const SimplexVector& p, const Eigen::VectorXd& alpha) {
  if (alpha.size() != p.size()) throw Error(ErrorCode::DimensionMismatch, "log_dirichlet_pdf: size mismatch");
  if (!alpha.allFinite() || (alpha.array() <= 0.0).any()) {
    throw Error(ErrorCode::NonPositiveAlpha, "concentrations must be positive");
  }
  double out = log_gamma(alpha.sum());
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    out -= log_gamma(alpha[k]);
    const double a1 = alpha[k] - 1.0;
    if (a1 == 0.0) continue;
    if (p[k] == 0.0) return a1 > 0.0 ? kNegInf : std::numeric_limits<double>::infinity();
    out += a1 * std::log(p[k]);
  }
  return out;
}

double log_sum_exp(const Eigen::VectorXd& v) {
  if (v.size() == 0) return kNegInf;
  const double hi = v.maxCoeff();
  if (!std::isfinite(hi)) return hi;
  return hi + std::log((v.array() - hi).exp().sum());
}

}  // namespace korea
