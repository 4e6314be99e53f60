#pragma once

#include "normcluster/clustering.hpp"

namespace normcluster {

struct DbscanParams {
  double eps = 2.0;
  std::size_t min_members = 2;
};

/// Density clustering over Euclidean distance. A point is core when its
/// closed eps-ball (itself included) holds at least min_members points.
/// Clusters are grown from core points in input order; a border point joins
/// the first cluster that reaches it; everything else is kNoise.
///
/// Throws InputError on empty input, eps <= 0 or min_members == 0.
ClusterAssignment dbscan(const Points& points, const DbscanParams& params);

}  // namespace normcluster
