#pragma once

#include <cstdint>
#include <functional>

#include "normcluster/clustering.hpp"

namespace normcluster {

struct KMeansParams {
  std::size_t k = 4;
  std::uint64_t seed = 0;
  std::size_t restarts = 10;
  std::size_t max_iter = 300;
  /// Converged once no centroid moves farther than this (Euclidean).
  double tol = 1e-4;
};

/// Called after every assignment step with the inertia of that assignment.
using KMeansTraceHook = std::function<void(std::size_t restart, std::size_t iteration, double inertia)>;

/// Lloyd iteration seeded with k-means++, best of `restarts` seeded runs by
/// inertia. Points are assigned to their nearest centroid with ties going
/// to the lower centroid index. A centroid that loses all its points is
/// reseeded at the point farthest from its own centroid.
///
/// Throws InputError on empty input, k == 0, k > |points|, restarts == 0 or
/// max_iter == 0.
ClusterAssignment kmeans(const Points& points, const KMeansParams& params,
                         const KMeansTraceHook& trace = {});

}  // namespace normcluster
