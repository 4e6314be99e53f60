#pragma once

// Embedding corpora: JSONL parsing and resolution of each record to a single
// vector (focus word, token mean, or a precomputed sentence vector).

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "normcluster/category.hpp"
#include "normcluster/points.hpp"

namespace normcluster {

struct Token {
  std::string surface;
  Vector vector;
};

struct EmbeddingRecord {
  std::string id;
  std::string text;
  std::string model_id;
  std::optional<std::vector<Token>> tokens;
  std::optional<Vector> sentence_vector;
  std::optional<Category> label;
  std::optional<std::string> source_doc;
};

struct Corpus {
  std::vector<EmbeddingRecord> records;
  /// Shared vector dimensionality; unset for an empty corpus.
  std::optional<std::size_t> dim;

  std::size_t size() const noexcept { return records.size(); }
  bool has_tokens() const noexcept;
  bool fully_labeled() const noexcept;
  /// Index of the record with this id, or nullopt.
  std::optional<std::size_t> find(std::string_view id) const;
};

/// Parses line-delimited JSON. Blank lines are skipped. Throws ParseError
/// naming the offending line for malformed JSON, dimension mismatches,
/// duplicate ids, records without any vector, and unknown or non-normative
/// labels.
Corpus parse_corpus(std::istream& in);
Corpus load_corpus(const std::string& path);

void write_record(std::ostream& out, const EmbeddingRecord& rec);
void write_corpus(std::ostream& out, const Corpus& corpus);

enum class ExtractionMode { FocusWord, TokenMean, SentenceDirect };

std::string_view to_string(ExtractionMode m) noexcept;
std::optional<ExtractionMode> parse_extraction_mode(std::string_view name) noexcept;

/// Ordered cue patterns; earlier entries take precedence. A pattern ending in
/// '*' is a prefix pattern, anything else is matched as a whole token. All
/// matching ignores ASCII case.
class FocusWordList {
public:
  FocusWordList() = default;
  explicit FocusWordList(std::vector<std::string> patterns);

  /// The expert list: taxation, tax*, VAT, revenue-raising, redistribution,
  /// income, reward, pay.
  static FocusWordList tax_law_default();
  /// One pattern per non-empty line; '#' starts a comment line.
  static FocusWordList load(const std::string& path);

  const std::vector<std::string>& patterns() const noexcept { return patterns_; }
  bool matches(std::size_t pattern_index, std::string_view surface) const;

private:
  std::vector<std::string> patterns_;  // lowercased
};

struct FocusMatch {
  std::size_t token_index;
  std::string pattern;
};

/// Highest-precedence pattern wins; among its matches the leftmost token.
/// nullopt when no token matches any pattern. Throws InputError when the
/// record carries no tokens.
std::optional<FocusMatch> select_focus_token(const EmbeddingRecord& record,
                                             const FocusWordList& words);

/// Component-wise mean of all token vectors. Throws InputError on a missing
/// or empty token list.
Vector token_mean(const EmbeddingRecord& record);

struct ResolvedEmbedding {
  Vector vector;
  /// FocusWord only: no cue matched and the token mean was used instead.
  bool fell_back = false;
  std::optional<std::string> matched_pattern;
};

ResolvedEmbedding resolve_embedding(const EmbeddingRecord& record, ExtractionMode mode,
                                    const FocusWordList& words);

struct ResolvedCorpus {
  Points points;
  std::vector<std::string> ids;
  /// Ids of records that fell back to the token mean.
  std::vector<std::string> fallback_ids;
};

/// Resolves every record of the corpus under one mode.
ResolvedCorpus resolve_corpus(const Corpus& corpus, ExtractionMode mode,
                              const FocusWordList& words);

}  // namespace normcluster
