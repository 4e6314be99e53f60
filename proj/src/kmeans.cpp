#include "normcluster/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "normcluster/error.hpp"
#include "normcluster/rng.hpp"
#include "normcluster/simd/kernels.hpp"

namespace normcluster {
namespace {

struct RunState {
  Points centroids;
  std::vector<ClusterId> labels;
  std::vector<double> dist;  // squared distance to the assigned centroid
  double inertia = 0.0;
};

Points seed_plus_plus(const Points& points, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = points.size();
  const auto& kernels = simd::active();
  Points centroids(points.dim());
  centroids.push_back(points[uniform_index(rng, n)]);

  std::vector<double> best(n);
  kernels.squared_l2_rows(centroids[0].data(), points.data(), n, points.dim(), best.data());
  std::vector<double> scratch(n);

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : best) total += d;
    std::size_t next = 0;
    if (total <= 0.0) {
      next = uniform_index(rng, n);
    } else {
      const double target = uniform01(rng) * total;
      double cum = 0.0;
      next = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (best[i] <= 0.0) continue;
        cum += best[i];
        if (target < cum) {
          next = i;
          break;
        }
      }
      // Rounding can leave target == cum at the very end; take the last
      // candidate with positive weight.
      if (next == n) {
        for (std::size_t i = n; i-- > 0;) {
          if (best[i] > 0.0) {
            next = i;
            break;
          }
        }
      }
    }
    centroids.push_back(points[next]);
    kernels.squared_l2_rows(centroids[c].data(), points.data(), n, points.dim(), scratch.data());
    for (std::size_t i = 0; i < n; ++i) best[i] = std::min(best[i], scratch[i]);
  }
  return centroids;
}

/// Nearest-centroid assignment, ties to the lowest index. Returns true when
/// any label changed.
bool assign(const Points& points, RunState& s) {
  const std::size_t n = points.size();
  const std::size_t k = s.centroids.size();
  const auto& kernels = simd::active();
  bool changed = false;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    ClusterId best_c = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const double d = kernels.squared_l2(points[i].data(), s.centroids[c].data(), points.dim());
      if (d < best) {
        best = d;
        best_c = static_cast<ClusterId>(c);
      }
    }
    if (s.labels[i] != best_c) changed = true;
    s.labels[i] = best_c;
    s.dist[i] = best;
  }
  return changed;
}

/// Moves each empty centroid onto the point farthest from its own centroid,
/// taken from a cluster that keeps at least one member.
bool reseed_empty(const Points& points, RunState& s) {
  const std::size_t k = s.centroids.size();
  std::vector<std::size_t> counts(k, 0);
  for (ClusterId c : s.labels) ++counts[static_cast<std::size_t>(c)];
  bool moved = false;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] != 0) continue;
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (counts[static_cast<std::size_t>(s.labels[i])] > 1 && s.dist[i] > far_d) {
        far_d = s.dist[i];
        far = i;
      }
    }
    if (far == points.size()) return moved;
    --counts[static_cast<std::size_t>(s.labels[far])];
    ++counts[c];
    s.labels[far] = static_cast<ClusterId>(c);
    s.dist[far] = 0.0;
    std::copy(points[far].begin(), points[far].end(), s.centroids.row(c).begin());
    moved = true;
  }
  return moved;
}

double total(const std::vector<double>& d) {
  double s = 0.0;
  for (double x : d) s += x;
  return s;
}

/// Mean of each cluster; returns the largest centroid displacement.
double update_centroids(const Points& points, RunState& s) {
  const std::size_t k = s.centroids.size();
  const std::size_t dim = points.dim();
  Points sums(k, dim);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = static_cast<std::size_t>(s.labels[i]);
    simd::accumulate(sums.row(c), points[i]);
    ++counts[c];
  }
  double max_shift = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) {
      // Still empty after reseeding (all points coincide); keep the old centroid.
      std::copy(s.centroids[c].begin(), s.centroids[c].end(), sums.row(c).begin());
      continue;
    }
    const double inv = 1.0 / static_cast<double>(counts[c]);
    for (double& x : sums.row(c)) x *= inv;
    max_shift = std::max(max_shift, std::sqrt(simd::squared_l2(sums[c], s.centroids[c])));
  }
  s.centroids = std::move(sums);
  return max_shift;
}

RunState run_once(const Points& points, const KMeansParams& params, std::mt19937_64& rng,
                  std::size_t restart, const KMeansTraceHook& trace) {
  RunState s;
  s.centroids = seed_plus_plus(points, params.k, rng);
  s.labels.assign(points.size(), -1);
  s.dist.assign(points.size(), 0.0);

  std::size_t iter = 0;
  for (; iter < params.max_iter; ++iter) {
    bool changed = assign(points, s);
    changed = reseed_empty(points, s) || changed;
    if (trace) trace(restart, iter, total(s.dist));
    if (!changed && iter > 0) break;
    if (update_centroids(points, s) <= params.tol) {
      ++iter;
      break;
    }
  }
  assign(points, s);
  reseed_empty(points, s);
  s.inertia = total(s.dist);
  if (trace) trace(restart, iter, s.inertia);
  return s;
}

}  // namespace

ClusterAssignment kmeans(const Points& points, const KMeansParams& params,
                         const KMeansTraceHook& trace) {
  if (points.empty()) throw InputError("kmeans: no points");
  if (params.k == 0) throw InputError("kmeans: k must be positive");
  if (params.k > points.size()) {
    throw InputError("kmeans: k = " + std::to_string(params.k) + " exceeds the number of points (" +
                     std::to_string(points.size()) + ")");
  }
  if (params.restarts == 0) throw InputError("kmeans: restarts must be >= 1");
  if (params.max_iter == 0) throw InputError("kmeans: max_iter must be >= 1");
  if (!(params.tol >= 0.0)) throw InputError("kmeans: tol must be non-negative");

  RunState best;
  bool have_best = false;
  for (std::size_t r = 0; r < params.restarts; ++r) {
    std::mt19937_64 rng(splitmix64(params.seed + splitmix64(r)));
    RunState s = run_once(points, params, rng, r, trace);
    if (!have_best || s.inertia < best.inertia) {
      best = std::move(s);
      have_best = true;
    }
  }

  ClusterAssignment out;
  out.labels = std::move(best.labels);
  out.n_clusters = params.k;
  out.centroids = std::move(best.centroids);
  out.inertia = best.inertia;
  return out;
}

}  // namespace normcluster
