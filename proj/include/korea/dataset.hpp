#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <utility>

namespace korea {

/// N observations of dimension d, one per row.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Eigen::MatrixXd values) : values_(std::move(values)) {}

  Eigen::Index size() const { return values_.rows(); }
  Eigen::Index dim() const { return values_.cols(); }
  const Eigen::MatrixXd& values() const { return values_; }
  auto row(Eigen::Index i) const { return values_.row(i); }

  Eigen::VectorXd mean() const;
  /// Biased (1/N) sample covariance.
  Eigen::MatrixXd covariance() const;

 private:
  Eigen::MatrixXd values_;
};

inline Eigen::VectorXd Dataset::mean() const {
  return values_.colwise().mean().transpose();
}

inline Eigen::MatrixXd Dataset::covariance() const {
  const Eigen::MatrixXd centered = values_.rowwise() - values_.colwise().mean();
  return (centered.transpose() * centered) / static_cast<double>(values_.rows());
}

}  // namespace korea
