#include "normcluster/awh.hpp"

#include <algorithm>
#include <ostream>

#include "normcluster/text_io.hpp"

namespace normcluster {
namespace {

using Counts = std::array<std::size_t, kNormativeCategoryCount>;

void check_label(Category c) {
  if (!is_normative(c)) throw InputError("cluster members must carry a normative category");
}

/// Majority over kNormativeCategories order, so ties go to the
/// lexicographically smallest name.
std::size_t majority_index(const Counts& counts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  return best;
}

void check_aligned(const ClusterAssignment& a, std::span<const Category> labels) {
  if (a.labels.size() != labels.size()) {
    throw InputError("assignment covers " + std::to_string(a.labels.size()) + " points but " +
                     std::to_string(labels.size()) + " labels were given");
  }
}

/// Per-cluster counts; index n_clusters holds noise.
std::vector<Counts> tally(const ClusterAssignment& a, std::span<const Category> labels) {
  check_aligned(a, labels);
  std::vector<Counts> counts(a.n_clusters + 1, Counts{});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    check_label(labels[i]);
    const ClusterId c = a.labels[i];
    if (c != kNoise && (c < 0 || static_cast<std::size_t>(c) >= a.n_clusters)) {
      throw InputError("cluster id " + std::to_string(c) + " out of range");
    }
    const std::size_t slot = c == kNoise ? a.n_clusters : static_cast<std::size_t>(c);
    ++counts[slot][normative_index(labels[i])];
  }
  return counts;
}

std::size_t sum(const Counts& c) {
  std::size_t s = 0;
  for (auto x : c) s += x;
  return s;
}

}  // namespace

double weighed_homogeneity(std::span<const Category> members, std::size_t n_total) {
  if (members.empty()) throw InputError("weighed_homogeneity: empty cluster");
  if (n_total == 0) throw InputError("weighed_homogeneity: n_total is zero");
  if (n_total < members.size()) throw InputError("weighed_homogeneity: n_total smaller than cluster");
  Counts counts{};
  for (Category c : members) {
    check_label(c);
    ++counts[normative_index(c)];
  }
  return static_cast<double>(counts[majority_index(counts)]) / static_cast<double>(n_total);
}

AwhScore awh(const ClusterAssignment& assignment, std::span<const Category> labels) {
  const auto counts = tally(assignment, labels);
  AwhScore score;
  score.n_samples = labels.size();
  double total = 0.0;
  for (std::size_t c = 0; c < assignment.n_clusters; ++c) {
    if (sum(counts[c]) == 0) continue;
    total += static_cast<double>(counts[c][majority_index(counts[c])]) / static_cast<double>(labels.size());
    ++score.n_clusters;
  }
  if (score.n_clusters == 0) throw NoClustersError();
  score.value = total / static_cast<double>(score.n_clusters);
  return score;
}

std::vector<CompositionRow> composition_report(const ClusterAssignment& assignment,
                                               std::span<const Category> labels) {
  const auto counts = tally(assignment, labels);
  const double n_total = static_cast<double>(labels.size());
  std::vector<CompositionRow> rows;
  for (std::size_t slot = 0; slot < counts.size(); ++slot) {
    const std::size_t size = sum(counts[slot]);
    if (size == 0) continue;
    CompositionRow row;
    row.cluster_id = slot == assignment.n_clusters ? kNoise : static_cast<ClusterId>(slot);
    row.size = size;
    row.counts = counts[slot];
    const std::size_t m = majority_index(row.counts);
    row.majority = kNormativeCategories[m];
    row.homogeneity = static_cast<double>(row.counts[m]) / static_cast<double>(size);
    row.weighed_homogeneity = static_cast<double>(row.counts[m]) / n_total;
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const CompositionRow& a, const CompositionRow& b) {
    if (a.size != b.size) return a.size > b.size;
    return !a.is_noise() && b.is_noise();
  });
  return rows;
}

void write_composition_tsv(std::ostream& out, const std::vector<CompositionRow>& rows) {
  out << "cluster_id\tsize";
  for (Category c : kNormativeCategories) out << '\t' << to_string(c);
  out << "\tmajority\thomogeneity\tweighed_homogeneity\n";
  for (const auto& r : rows) {
    if (r.is_noise()) {
      out << "noise";
    } else {
      out << r.cluster_id;
    }
    out << '\t' << r.size;
    for (auto n : r.counts) out << '\t' << n;
    out << '\t' << to_string(r.majority) << '\t' << format_double(r.homogeneity) << '\t'
        << format_double(r.weighed_homogeneity) << '\n';
  }
}

}  // namespace normcluster
