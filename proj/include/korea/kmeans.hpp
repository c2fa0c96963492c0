#pragma once

#include "korea/dataset.hpp"
#include "korea/rng.hpp"

#include <vector>

namespace korea {

struct KMeansResult {
  Eigen::MatrixXd centers;  // K x d
  std::vector<int> assignment;
};

/// k-means++ seeding followed by at most `lloyd_iters` Lloyd refinements.
/// Shared by the VB and EM initializers.
KMeansResult kmeans_pp(const Dataset& data, int k, Rng& rng, int lloyd_iters = 20);

}  // namespace korea
