#include "normcluster/clustering.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "normcluster/simd/kernels.hpp"

namespace normcluster {

std::size_t ClusterAssignment::noise_count() const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
}

std::vector<std::size_t> ClusterAssignment::cluster_sizes() const {
  std::vector<std::size_t> sizes(n_clusters, 0);
  for (ClusterId id : labels) {
    if (id != kNoise) ++sizes.at(static_cast<std::size_t>(id));
  }
  return sizes;
}

double inertia(const Points& points, const std::vector<ClusterId>& labels, const Points& centroids) {
  if (labels.size() != points.size()) {
    throw std::out_of_range("inertia: " + std::to_string(labels.size()) + " labels for " +
                            std::to_string(points.size()) + " points");
  }
  if (!points.empty() && points.dim() != centroids.dim()) {
    throw std::out_of_range("inertia: centroid dimension differs from point dimension");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const ClusterId c = labels[i];
    if (c < 0 || static_cast<std::size_t>(c) >= centroids.size()) {
      throw std::out_of_range("inertia: cluster id " + std::to_string(c) + " out of range");
    }
    total += simd::squared_l2(points[i], centroids[static_cast<std::size_t>(c)]);
  }
  return total;
}

}  // namespace normcluster
