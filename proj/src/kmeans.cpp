#include "korea/kmeans.hpp"

#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <limits>

namespace korea {

namespace {

std::vector<int> assign_nearest(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centers,
                                Eigen::VectorXd* best_dist = nullptr) {
  const auto n = x.rows();
  std::vector<int> out(static_cast<std::size_t>(n), 0);
  if (best_dist) best_dist->resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < centers.rows(); ++k) {
      const double dist = (x.row(i) - centers.row(k)).squaredNorm();
      if (dist < best) {
        best = dist;
        out[static_cast<std::size_t>(i)] = static_cast<int>(k);
      }
    }
    if (best_dist) (*best_dist)[i] = best;
  }
  return out;
}

}  // namespace

KMeansResult kmeans_pp(const Dataset& data, int k, Rng& rng, int lloyd_iters) {
  const auto& x = data.values();
  const auto n = x.rows();
  KMeansResult out;
  out.centers.resize(k, x.cols());

  boost::random::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  boost::random::uniform_real_distribution<double> unif(0.0, 1.0);
  out.centers.row(0) = x.row(pick(rng));

  Eigen::VectorXd dist2 = (x.rowwise() - out.centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      const double target = unif(rng) * total;
      double acc = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc > target && dist2[i] > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    out.centers.row(c) = x.row(chosen);
    dist2 = dist2.cwiseMin((x.rowwise() - out.centers.row(c)).rowwise().squaredNorm());
  }

  out.assignment = assign_nearest(x, out.centers);
  for (int it = 0; it < lloyd_iters; ++it) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = out.assignment[static_cast<std::size_t>(i)];
      sums.row(a) += x.row(i);
      counts[a] += 1.0;
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0.0) out.centers.row(c) = sums.row(c) / counts[c];
    }
    auto next = assign_nearest(x, out.centers);
    const bool stable = next == out.assignment;
    out.assignment = std::move(next);
    if (stable) break;
  }
  return out;
}

}  // namespace korea
