#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "normcluster/points.hpp"

namespace normcluster {

using ClusterId = std::int32_t;
inline constexpr ClusterId kNoise = -1;

/// Result of one clustering run. k-means fills centroids and inertia;
/// DBSCAN fills core flags and may label points kNoise.
struct ClusterAssignment {
  std::vector<ClusterId> labels;
  std::size_t n_clusters = 0;
  Points centroids;
  double inertia = 0.0;
  std::vector<bool> core;

  std::size_t noise_count() const noexcept;
  std::vector<std::size_t> cluster_sizes() const;
};

/// Sum of squared Euclidean distances from each point to its centroid.
/// Throws std::out_of_range for labels outside [0, centroids.size()).
double inertia(const Points& points, const std::vector<ClusterId>& labels, const Points& centroids);

}  // namespace normcluster
