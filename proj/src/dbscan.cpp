#include "normcluster/dbscan.hpp"

#include <cmath>
#include <deque>

#include "normcluster/error.hpp"
#include "normcluster/simd/kernels.hpp"

namespace normcluster {
namespace {

constexpr ClusterId kUnvisited = -2;

/// Closed eps-neighbourhoods in ascending index order, each point included
/// in its own.
std::vector<std::vector<std::size_t>> neighbourhoods(const Points& points, double eps) {
  const std::size_t n = points.size();
  const double eps2 = eps * eps;
  const auto& kernels = simd::active();
  std::vector<std::vector<std::size_t>> nbrs(n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    kernels.squared_l2_rows(points[i].data(), points.data(), n, points.dim(), d.data());
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || d[j] <= eps2) nbrs[i].push_back(j);
    }
  }
  return nbrs;
}

}  // namespace

ClusterAssignment dbscan(const Points& points, const DbscanParams& params) {
  if (points.empty()) throw InputError("dbscan: no points");
  if (!(params.eps > 0.0) || !std::isfinite(params.eps)) throw InputError("dbscan: eps must be positive");
  if (params.min_members == 0) throw InputError("dbscan: min_members must be >= 1");

  const std::size_t n = points.size();
  const auto nbrs = neighbourhoods(points, params.eps);

  ClusterAssignment out;
  out.core.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.core[i] = nbrs[i].size() >= params.min_members;

  std::vector<ClusterId> labels(n, kUnvisited);
  ClusterId next = 0;
  std::deque<std::size_t> frontier;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (labels[seed] != kUnvisited || !out.core[seed]) continue;
    const ClusterId id = next++;
    labels[seed] = id;
    frontier.push_back(seed);
    while (!frontier.empty()) {
      const std::size_t p = frontier.front();
      frontier.pop_front();
      for (std::size_t q : nbrs[p]) {
        if (labels[q] != kUnvisited) continue;
        labels[q] = id;
        if (out.core[q]) frontier.push_back(q);
      }
    }
  }
  for (auto& l : labels) {
    if (l == kUnvisited) l = kNoise;
  }
  out.labels = std::move(labels);
  out.n_clusters = static_cast<std::size_t>(next);
  return out;
}

}  // namespace normcluster
