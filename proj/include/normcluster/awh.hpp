#pragma once

// Average weighed homogeneity (AWH) and per-cluster composition reports.
//
// The weighed homogeneity of a cluster is its majority-category share times
// its share of all samples, which reduces to majority count / total samples.
// AWH averages that over the non-noise clusters. Noise points still count
// towards the total, so heavy-noise runs score low.

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "normcluster/category.hpp"
#include "normcluster/clustering.hpp"
#include "normcluster/error.hpp"

namespace normcluster {

/// Thrown by awh() when the assignment has no non-empty, non-noise cluster.
class NoClustersError : public InputError {
public:
  NoClustersError() : InputError("assignment has no clusters (all points are noise)") {}
};

double weighed_homogeneity(std::span<const Category> members, std::size_t n_total);

struct AwhScore {
  double value = 0.0;
  /// Non-empty, non-noise clusters that entered the average.
  std::size_t n_clusters = 0;
  std::size_t n_samples = 0;
};

/// labels[i] is the gold category of point i; all must be normative.
AwhScore awh(const ClusterAssignment& assignment, std::span<const Category> labels);

struct CompositionRow {
  ClusterId cluster_id = kNoise;
  std::size_t size = 0;
  /// Indexed like kNormativeCategories.
  std::array<std::size_t, kNormativeCategoryCount> counts{};
  Category majority = Category::Deontological;
  double homogeneity = 0.0;
  double weighed_homogeneity = 0.0;

  bool is_noise() const noexcept { return cluster_id == kNoise; }
};

/// One row per non-empty cluster plus a noise row when noise exists, sorted
/// by size descending (ties: clusters before noise, then by id).
std::vector<CompositionRow> composition_report(const ClusterAssignment& assignment,
                                               std::span<const Category> labels);

/// Columns: cluster_id, size, one per category, majority, homogeneity,
/// weighed_homogeneity. The noise row uses cluster_id "noise".
void write_composition_tsv(std::ostream& out, const std::vector<CompositionRow>& rows);

}  // namespace normcluster
