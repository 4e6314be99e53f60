#pragma once

// Expert-in-the-loop mining: segment a document, classify its sentences,
// export the positives for review, and fold the verdicts back into the
// training set.

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "normcluster/classifier.hpp"

namespace normcluster {

struct Sentence {
  std::string id;
  std::string text;
  /// Byte offsets into the source text, [begin, end).
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct SegmentedDocument {
  std::string doc_id;
  std::vector<Sentence> sentences;
};

/// Rule-based splitter. Boundaries follow a run of . ! ? ; (plus closing
/// quotes or brackets) when whitespace or the end of text comes next, and
/// every line break. A '.' after a known abbreviation or a single-letter
/// initial does not end a sentence. Sentences are trimmed; empty ones are
/// dropped. Ids are "<doc_id>:<n>" counting from 1.
SegmentedDocument segment(std::string_view text, std::string doc_id);

/// TSV: sentence_id, doc_id, begin, end, text.
void write_sentences_tsv(std::ostream& out, const SegmentedDocument& doc);
SegmentedDocument read_sentences_tsv(std::istream& in);

enum class VerdictKind { Pending, Accepted, Rejected };

struct Verdict {
  VerdictKind kind = VerdictKind::Pending;
  /// Meaningful only for Accepted; always a normative category.
  Category category = Category::Deontological;

  static Verdict pending() { return {}; }
  static Verdict accepted(Category c);
  static Verdict rejected() { return {VerdictKind::Rejected, Category::Deontological}; }
};

/// "" -> Pending, "reject" -> Rejected, "accept:<Category>" -> Accepted.
Verdict parse_verdict(std::string_view field);
std::string format_verdict(const Verdict& v);

struct ReviewEntry {
  std::string sentence_id;
  std::string doc_id;
  std::string text;
  Category predicted = Category::NonNormative;
  double gate_similarity = 0.0;
  Verdict verdict;
};

struct ReviewBatch {
  std::vector<ReviewEntry> entries;
};

/// Sentences an expert rejected, keyed by (doc_id, sentence_id).
class RejectionLedger {
public:
  bool contains(std::string_view doc_id, std::string_view sentence_id) const;
  /// Returns false if the entry was already present.
  bool add(std::string doc_id, std::string sentence_id);
  std::size_t size() const noexcept { return keys_.size(); }

  /// Reads the append-only JSONL ledger; one {"doc_id", "sentence_id", ...}
  /// object per line.
  static RejectionLedger load(std::istream& in);
  static void append(std::ostream& out, const ReviewEntry& rejected);

private:
  std::set<std::pair<std::string, std::string>, std::less<>> keys_;
};

using EmbeddingMap = std::map<std::string, Vector, std::less<>>;

/// Classifies every sentence and returns the positives as Pending entries,
/// most centroid-similar first. Sentences in the rejection ledger or already
/// part of the training set are skipped. Throws InputError when a sentence
/// has no embedding.
ReviewBatch mine(const ClassifierModel& model, const SegmentedDocument& doc, const EmbeddingMap& embeddings,
                 const RejectionLedger* ledger = nullptr);

struct MergeOutcome {
  std::vector<LabeledSample> training;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Appends every Accepted entry to the training samples and records every
/// Rejected one in the ledger. Throws InputError if any entry is still
/// Pending, an accepted sentence has no embedding, or its id already names a
/// training sample.
MergeOutcome merge_reviews(std::vector<LabeledSample> training, const ReviewBatch& batch,
                           const EmbeddingMap& embeddings, RejectionLedger& ledger);

/// TSV: sentence_id, doc_id, text, predicted_category, gate_similarity,
/// verdict (blank until reviewed).
void write_review_tsv(std::ostream& out, const ReviewBatch& batch);
ReviewBatch read_review_tsv(std::istream& in);

}  // namespace normcluster
