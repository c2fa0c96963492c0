#pragma once

#include <Eigen/Dense>

#include <limits>

namespace korea {

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kSimplexTolerance = 1e-10;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct SpdFactor {
  Eigen::MatrixXd lower;  // lower * lower^T == the factored matrix
  double logdet = 0.0;
};

/// Cholesky factor and log-determinant of a symmetric positive-definite
/// matrix. The input is symmetrized before factoring.
/// Throws NotSymmetric when the relative asymmetry exceeds 1e-10 and NotSpd
/// when any pivot is non-positive (or the input is not finite).
SpdFactor spd_factor_logdet(const Eigen::MatrixXd& m);

/// A symmetric positive-definite matrix with its factorization cached.
/// Construction validates; an SpdMatrix that exists is SPD.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Eigen::MatrixXd& m);

  static SpdMatrix identity(Eigen::Index d) { return SpdMatrix(Eigen::MatrixXd::Identity(d, d)); }

  Eigen::Index dim() const { return matrix_.rows(); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::MatrixXd& lower() const { return factor_.lower; }
  double logdet() const { return factor_.logdet; }

  Eigen::MatrixXd inverse() const;
  /// x^T M x
  double quadratic_form(const Eigen::VectorXd& x) const;
  /// trace(M^{-1} X)
  double trace_inverse_times(const Eigen::MatrixXd& x) const;

 private:
  Eigen::MatrixXd matrix_;
  SpdFactor factor_;
};

/// Non-negative weights summing to one (within 1e-10).
class SimplexVector {
 public:
  explicit SimplexVector(Eigen::VectorXd weights);

  Eigen::Index size() const { return weights_.size(); }
  double operator[](Eigen::Index k) const { return weights_[k]; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  Eigen::VectorXd weights_;
};

double log_gamma(double x);
double digamma(double x);
/// log of the multivariate gamma function Gamma_d(a).
double log_multigamma(double a, int d);

double log_mvn_pdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const SpdMatrix& precision);

/// Wishart log-density of `x` with scale matrix `scale` and `dof` degrees of
/// freedom (mean dof * scale).
double log_wishart_pdf(const SpdMatrix& x, const SpdMatrix& scale, double dof);

/// Dirichlet log-density over the simplex. Returns -inf when a weight is
/// exactly zero under a concentration above one.
double log_dirichlet_pdf(const SimplexVector& p, const Eigen::VectorXd& alpha);

/// log(sum(exp(v))) without overflow; -inf for an all -inf input.
double log_sum_exp(const Eigen::VectorXd& v);

}  // namespace korea
