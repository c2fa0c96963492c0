#include <doctest.h>

#include "korea/densities.hpp"
#include "korea/errors.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace korea;

namespace {

Eigen::MatrixXd random_spd(std::mt19937_64& gen, int d) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = normal(gen);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(d, d);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected korea::Error");
  return ErrorCode::InvalidArgument;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("spd factor log-determinant") {
  CHECK(spd_factor_logdet(Eigen::MatrixXd::Identity(2, 2)).logdet == doctest::Approx(0.0));
  const Eigen::MatrixXd diag = vec({2.0, 3.0}).asDiagonal();
  CHECK(spd_factor_logdet(diag).logdet == doctest::Approx(1.7917595).epsilon(1e-7));

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  CHECK(code_of([&] { spd_factor_logdet(indefinite); }) == ErrorCode::NotSpd);

  Eigen::MatrixXd skew(2, 2);
  skew << 2, 0.5, 0.4, 2;
  CHECK(code_of([&] { SpdMatrix{skew}; }) == ErrorCode::NotSymmetric);

  // Asymmetry below the tolerance is symmetrized away.
  Eigen::MatrixXd nearly(2, 2);
  nearly << 2, 0.5, 0.5 + 1e-13, 2;
  CHECK_NOTHROW(SpdMatrix{nearly});
}

TEST_CASE("factor reconstructs and logdet matches eigenvalues") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 5;
    const Eigen::MatrixXd m = random_spd(gen, d);
    const auto f = spd_factor_logdet(m);
    CHECK((f.lower * f.lower.transpose() - m).norm() <= 1e-9 * m.norm());
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
    CHECK(f.logdet == doctest::Approx(eig.array().log().sum()).epsilon(1e-8));
  }
}

TEST_CASE("gaussian log density") {
  const SpdMatrix one(Eigen::MatrixXd::Identity(1, 1));
  CHECK(log_mvn_pdf(vec({0}), vec({0}), one) == doctest::Approx(-0.9189385).epsilon(1e-7));
  CHECK(log_mvn_pdf(vec({1, 2}), vec({1, 2}), SpdMatrix::identity(2)) ==
        doctest::Approx(-1.8378771).epsilon(1e-7));
  const SpdMatrix four(Eigen::MatrixXd::Constant(1, 1, 4.0));
  CHECK(log_mvn_pdf(vec({1}), vec({0}), four) == doctest::Approx(-2.2257913).epsilon(1e-7));
  CHECK(code_of([&] { log_mvn_pdf(vec({1, 2}), vec({0}), one); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("gaussian density integrates to one") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> mean_dist(-5, 5), prec_dist(0.2, 5);
  for (int trial = 0; trial < 10; ++trial) {
    const double mu = mean_dist(gen);
    const double prec = prec_dist(gen);
    const SpdMatrix q(Eigen::MatrixXd::Constant(1, 1, prec));
    const double sd = 1.0 / std::sqrt(prec);
    const double lo = mu - 12 * sd, hi = mu + 12 * sd;
    const int steps = 4000;
    const double h = (hi - lo) / steps;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
      const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      sum += w * std::exp(log_mvn_pdf(vec({lo + i * h}), vec({mu}), q));
    }
    CHECK(sum * h / 3.0 == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("gaussian density gradient vanishes at the mean") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 4;
    const SpdMatrix q(random_spd(gen, d));
    Eigen::VectorXd mean = Eigen::VectorXd::LinSpaced(d, -1.0, 2.0);
    const double eps = 1e-5;
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd up = mean, down = mean;
      up[j] += eps;
      down[j] -= eps;
      const double grad = (log_mvn_pdf(up, mean, q) - log_mvn_pdf(down, mean, q)) / (2 * eps);
      CHECK(std::abs(grad) < 1e-6);
      CHECK(log_mvn_pdf(up, mean, q) < log_mvn_pdf(mean, mean, q));
    }
  }
}

TEST_CASE("wishart log density") {
  const SpdMatrix one(Eigen::MatrixXd::Identity(1, 1));
  const double w = log_wishart_pdf(one, one, 3.0);
  CHECK(w == doctest::Approx(-1.4189386).epsilon(1e-7));
  // Gamma(shape 1.5, scale 2) at 1.
  const double gamma_pdf = 0.5 * std::log(1.0) - 0.5 - std::lgamma(1.5) - 1.5 * std::log(2.0);
  CHECK(w == doctest::Approx(gamma_pdf).epsilon(1e-12));

  CHECK(code_of([] { log_wishart_pdf(SpdMatrix::identity(2), SpdMatrix::identity(2), 1.0); }) ==
        ErrorCode::DofTooSmall);
  // Any dof above d - 1 is a proper density, including non-integer values below d.
  CHECK(std::isfinite(log_wishart_pdf(SpdMatrix::identity(2), SpdMatrix::identity(2), 1.5)));
  CHECK(code_of([] { log_wishart_pdf(SpdMatrix::identity(2), SpdMatrix::identity(3), 5.0); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("wishart density is rotation invariant") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd x = random_spd(gen, 2), s = random_spd(gen, 2);
    const double theta = 0.3 + trial;
    Eigen::MatrixXd r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    const double a = log_wishart_pdf(SpdMatrix(x), SpdMatrix(s), 4.5);
    const double b = log_wishart_pdf(SpdMatrix(r * x * r.transpose()), SpdMatrix(r * s * r.transpose()), 4.5);
    CHECK(std::abs(a - b) < 1e-10);
  }
}

TEST_CASE("wishart and dirichlet agree with brute force on random inputs") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unit(0.05, 1.0), conc(0.3, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 4;
    const Eigen::MatrixXd x = random_spd(gen, d), s = random_spd(gen, d);
    const double dof = d - 1 + 0.1 + 6.0 * unit(gen);
    const double ours = log_wishart_pdf(SpdMatrix(x), SpdMatrix(s), dof);
    CHECK(std::abs(ours - oracle::log_wishart(x, s, dof)) < 1e-10 * std::max(1.0, std::abs(ours)));

    const int k = 2 + trial % 5;
    Eigen::VectorXd p(k), alpha(k);
    for (int i = 0; i < k; ++i) {
      p[i] = unit(gen);
      alpha[i] = conc(gen);
    }
    p /= p.sum();
    const double dir = log_dirichlet_pdf(SimplexVector(p), alpha);
    CHECK(std::abs(dir - oracle::log_dirichlet(p, alpha)) < 1e-10 * std::max(1.0, std::abs(dir)));
  }
}

TEST_CASE("dirichlet log density") {
  CHECK(log_dirichlet_pdf(SimplexVector(vec({0.2, 0.3, 0.5})), vec({1, 1, 1})) ==
        doctest::Approx(0.6931472).epsilon(1e-7));
  CHECK(log_dirichlet_pdf(SimplexVector(vec({0.5, 0.5})), vec({2, 2})) ==
        doctest::Approx(0.4054651).epsilon(1e-7));
  CHECK(code_of([] { SimplexVector(vec({0.4, 0.7})); }) == ErrorCode::NotSimplex);
  CHECK(code_of([] { SimplexVector(vec({1.2, -0.2})); }) == ErrorCode::NotSimplex);
  CHECK(code_of([] { log_dirichlet_pdf(SimplexVector(vec({0.5, 0.5})), vec({1, 0})); }) ==
        ErrorCode::NonPositiveAlpha);

  // Zero weights: alpha = 1 contributes nothing, alpha > 1 gives -inf.
  CHECK(log_dirichlet_pdf(SimplexVector(vec({0.0, 1.0})), vec({1, 2})) == doctest::Approx(std::log(2.0)));
  CHECK(log_dirichlet_pdf(SimplexVector(vec({0.0, 1.0})), vec({2, 2})) == kNegInf);
}

TEST_CASE("special functions") {
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-13));
  CHECK(log_gamma(100.0) == doctest::Approx(std::lgamma(100.0)).epsilon(1e-13));
  CHECK(digamma(1.0) == doctest::Approx(-0.5772156649015329).epsilon(1e-13));
  for (double a : {1.5, 2.0, 7.25}) {
    for (int d = 1; d <= 4; ++d) CHECK(log_multigamma(a + d, d) == doctest::Approx(oracle::log_multigamma(a + d, d)));
  }
  CHECK(log_sum_exp(vec({1000.0, 1000.0})) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_sum_exp(vec({kNegInf, kNegInf})) == kNegInf);
}
