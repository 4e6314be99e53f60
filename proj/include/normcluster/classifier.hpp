#pragma once

// Centroid-gated kNN classifier. A query whose cosine similarity to the
// centroid of the training vectors falls below the gate is non-normative;
// otherwise its label is the plurality vote of its k nearest training
// vectors by cosine distance, with ties resolved by the single nearest one.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <span>
#include <vector>

#include "normcluster/category.hpp"
#include "normcluster/points.hpp"

namespace normcluster {

struct LabeledSample {
  std::string id;
  Vector vector;
  Category label;
};

struct Prediction {
  std::string record_id;
  Category label = Category::NonNormative;
  double gate_similarity = 0.0;
  /// Training ids of the k nearest neighbours, nearest first; empty when gated.
  std::vector<std::string> neighbor_ids;
};

inline constexpr double kDefaultGateThreshold = 0.6;
inline constexpr std::size_t kDefaultNeighbours = 3;

class ClassifierModel {
public:
  /// Throws InputError for empty or mixed-dimension samples, zero vectors,
  /// NonNormative labels, a gate outside [-1, 1], an even or zero k, or
  /// k larger than the training set.
  static ClassifierModel fit(std::vector<LabeledSample> samples,
                             double gate_threshold = kDefaultGateThreshold,
                             std::size_t k = kDefaultNeighbours, std::string model_id = {});

  const std::vector<LabeledSample>& training() const noexcept { return training_; }
  const Vector& centroid() const noexcept { return centroid_; }
  double gate_threshold() const noexcept { return gate_threshold_; }
  std::size_t k() const noexcept { return k_; }
  const std::string& model_id() const noexcept { return model_id_; }
  std::size_t dim() const noexcept { return centroid_.size(); }
  const Points& training_points() const noexcept { return matrix_; }
  const std::vector<double>& training_norms() const noexcept { return norms_; }

  /// Same training data with a different gate.
  ClassifierModel with_gate(double gate_threshold) const;

  void save(std::ostream& out) const;
  static ClassifierModel load(std::istream& in);

private:
  ClassifierModel() = default;

  std::vector<LabeledSample> training_;
  Points matrix_;
  std::vector<double> norms_;
  Vector centroid_;
  double gate_threshold_ = kDefaultGateThreshold;
  std::size_t k_ = kDefaultNeighbours;
  std::string model_id_;
};

/// Throws InputError on a dimension mismatch or a zero query vector.
Prediction predict(const ClassifierModel& model, std::span<const double> query, std::string record_id = {});

double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct PrEvaluation {
  std::size_t positives = 0;
  std::size_t true_positives = 0;
  std::size_t gold_positives = 0;
  double precision = 0.0;
  double recall = 0.0;

  static PrEvaluation from_counts(std::size_t positives, std::size_t true_positives,
                                  std::size_t gold_positives);
  /// "precision/recall" rounded to two decimals, e.g. "0.75/1".
  std::string summary() const;
};

/// A positive is a prediction other than NonNormative; it is true only if
/// its category equals the gold category. gold_positives counts the normative
/// gold entries. Throws InputError if a predicted id is missing from gold.
PrEvaluation evaluate(const std::vector<Prediction>& predictions,
                      const std::map<std::string, Category>& gold);

struct GateCalibrationRow {
  double threshold;
  std::size_t positives;
};

/// Positive counts over a set of queries for each candidate gate.
std::vector<GateCalibrationRow> calibrate_gate(const ClassifierModel& model, const Points& queries,
                                               const std::vector<double>& thresholds);

void write_predictions_jsonl(std::ostream& out, const std::vector<Prediction>& predictions,
                             const std::map<std::string, std::string>& doc_of = {});
struct DocPrediction {
  Prediction prediction;
  std::optional<std::string> doc;
};
std::vector<DocPrediction> read_predictions_jsonl(std::istream& in);

/// Gold file: TSV "record_id<TAB>Category" per line; NonNormative allowed.
std::map<std::string, Category> read_gold_tsv(std::istream& in);

}  // namespace normcluster
