#pragma once

// Reference computations that share no code with the library: plain loops,
// std::lgamma and Eigen's generic determinant/inverse.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

inline double log_multigamma(double a, int d) {
  double s = 0.25 * d * (d - 1) * std::log(std::numbers::pi);
  for (int j = 1; j <= d; ++j) s += std::lgamma(a + 0.5 * (1 - j));
  return s;
}

inline double log_wishart(const Eigen::MatrixXd& x, const Eigen::MatrixXd& scale, double dof) {
  const double d = static_cast<double>(x.rows());
  return 0.5 * (dof - d - 1.0) * std::log(x.determinant()) - 0.5 * (scale.inverse() * x).trace() -
         0.5 * dof * d * std::log(2.0) - 0.5 * dof * std::log(scale.determinant()) -
         log_multigamma(0.5 * dof, static_cast<int>(d));
}

inline double log_dirichlet(const Eigen::VectorXd& p, const Eigen::VectorXd& alpha) {
  double s = std::lgamma(alpha.sum());
  for (Eigen::Index k = 0; k < p.size(); ++k) s += -std::lgamma(alpha[k]) + (alpha[k] - 1.0) * std::log(p[k]);
  return s;
}

inline double log_normal(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Eigen::MatrixXd& precision) {
  const double d = static_cast<double>(x.size());
  const Eigen::VectorXd r = x - mean;
  return 0.5 * std::log(precision.determinant()) - 0.5 * d * std::log(2.0 * std::numbers::pi) -
         0.5 * r.dot(precision * r);
}

struct Prior {
  double alpha0;
  double beta0;
  Eigen::VectorXd m0;
  Eigen::MatrixXd W0;
  double nu0;
};

/// Same data-driven defaults as the library, recomputed here.
inline Prior default_prior(const Eigen::MatrixXd& x) {
  const auto d = x.cols();
  const Eigen::VectorXd mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd c = x.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = c.transpose() * c / static_cast<double>(x.rows());
  const double nu0 = static_cast<double>(d) + 2.0;
  return {1.0, 1.0, mean, cov.inverse() / nu0, nu0};
}

/// Log marginal likelihood of the rows of x under a single Gaussian with a
/// Normal-Wishart prior, in closed form. Empty input gives 0.
inline double log_nw_evidence(const Eigen::MatrixXd& x, const Prior& p) {
  const auto n = static_cast<double>(x.rows());
  if (x.rows() == 0) return 0.0;
  const int d = static_cast<int>(x.cols());
  const Eigen::VectorXd mean = x.colwise().mean().transpose();
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Eigen::VectorXd r = x.row(i).transpose() - mean;
    scatter += r * r.transpose();
  }
  const double beta_n = p.beta0 + n;
  const double nu_n = p.nu0 + n;
  const Eigen::VectorXd dm = mean - p.m0;
  const Eigen::MatrixXd t0 = p.W0.inverse();
  const Eigen::MatrixXd tn = t0 + scatter + (p.beta0 * n / beta_n) * dm * dm.transpose();
  return -0.5 * n * d * std::log(std::numbers::pi) + log_multigamma(0.5 * nu_n, d) -
         log_multigamma(0.5 * p.nu0, d) + 0.5 * p.nu0 * std::log(t0.determinant()) -
         0.5 * nu_n * std::log(tn.determinant()) + 0.5 * d * std::log(p.beta0 / beta_n);
}

inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -INFINITY) return a;
  return a + std::log1p(std::exp(b - a));
}

/// log p(y | K) by summing over all K^N labelings: symmetric Dirichlet-multinomial
/// for the labels times independent Normal-Wishart evidence per component.
inline double log_evidence_by_enumeration(const Eigen::MatrixXd& x, int k, const Prior& p) {
  const int n = static_cast<int>(x.rows());
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(k);
  double acc = -INFINITY;
  std::vector<int> z(static_cast<std::size_t>(n));
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) {
      members[c % static_cast<std::uint64_t>(k)].push_back(i);
      c /= static_cast<std::uint64_t>(k);
    }
    double term = std::lgamma(k * p.alpha0) - std::lgamma(k * p.alpha0 + n);
    for (const auto& m : members) {
      term += std::lgamma(p.alpha0 + static_cast<double>(m.size())) - std::lgamma(p.alpha0);
      Eigen::MatrixXd sub(static_cast<Eigen::Index>(m.size()), x.cols());
      for (std::size_t r = 0; r < m.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = x.row(m[r]);
      term += log_nw_evidence(sub, p);
    }
    acc = log_add(acc, term);
  }
  return acc;
}

/// log p(K) with p(K) proportional to exp(-K) on 1..k_max.
inline double log_prior_k(int k, int k_max) {
  double z = 0.0;
  for (int j = 1; j <= k_max; ++j) z += std::exp(-static_cast<double>(j));
  return -static_cast<double>(k) - std::log(z);
}

}  // namespace oracle
