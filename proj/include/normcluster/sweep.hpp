#pragma once

// Exhaustive configuration sweep: every (model, extraction mode) source
// crossed with every DBSCAN and k-means parameterisation, scored by AWH.

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "normcluster/awh.hpp"
#include "normcluster/corpus.hpp"
#include "normcluster/dbscan.hpp"
#include "normcluster/kmeans.hpp"

namespace normcluster {

enum class ModelFamily { Word, Sbert, Classical };

std::string_view to_string(ModelFamily f) noexcept;
std::optional<ModelFamily> parse_model_family(std::string_view name) noexcept;

/// Extraction modes a family supports: word models are clustered on a focus
/// word and on the token mean, the others on their sentence vector.
std::vector<ExtractionMode> modes_for(ModelFamily f);

struct ModelSource {
  std::string model_id;
  ModelFamily family;
};

struct GridSpec {
  std::vector<ModelSource> models;
  std::optional<std::vector<double>> eps;
  std::optional<std::vector<std::size_t>> min_members;
  std::optional<std::vector<std::size_t>> k;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
  std::size_t restarts = 10;
  std::size_t max_iter = 300;
  double tol = 1e-4;
  std::optional<std::vector<std::string>> focus_words;
};

/// Sweep spec file (JSON):
///   { "models": [{"id": ..., "family": "word"|"sbert"|"classical"}],
///     "dbscan": {"eps": [..], "min_members": [..]},
///     "kmeans": {"k": [..], "restarts"?, "max_iter"?, "tol"?},
///     "master_seed": n, "workers": n, "focus_words"?: [..] }
GridSpec parse_grid_spec(std::string_view json_text);
GridSpec load_grid_spec(const std::string& path);

using AlgorithmParams = std::variant<KMeansParams, DbscanParams>;

struct RunConfig {
  std::size_t index = 0;
  std::string model_id;
  ModelFamily family = ModelFamily::Sbert;
  ExtractionMode mode = ExtractionMode::SentenceDirect;
  AlgorithmParams algorithm;

  std::string_view algorithm_name() const noexcept;
  /// "k=4" or "eps=2.5,min_members=3".
  std::string params_string() const;
};

/// DBSCAN block first, then k-means; inside each block sources in model
/// order (word models contribute FocusWord then TokenMean), then parameters
/// (eps outer, min_members inner). k-means seeds derive from master_seed and
/// the config index. Throws InputError on an empty model list or an empty
/// parameter list.
std::vector<RunConfig> generate_grid(const GridSpec& spec);

/// Analytic grid size for cross-checking generate_grid.
std::size_t grid_size(const GridSpec& spec);

struct RunResult {
  RunConfig config;
  std::optional<AwhScore> score;
  std::optional<std::string> failure;
  std::vector<CompositionRow> composition;
  std::size_t noise = 0;
  std::chrono::duration<double> wall_time{};

  bool ok() const noexcept { return score.has_value(); }
};

struct SweepOptions {
  std::size_t workers = 1;
  FocusWordList focus_words = FocusWordList::tax_law_default();
};

/// Executes every config; per-run failures (all-noise DBSCAN, incompatible
/// mode) are recorded and do not stop the sweep. Results follow grid order.
/// Throws InputError before running anything if a model has no corpus or a
/// corpus is not fully labeled.
std::vector<RunResult> run_sweep(const std::map<std::string, Corpus>& corpora,
                                 const std::vector<RunConfig>& grid, const SweepOptions& options);

/// Drops failures, sorts by score descending (ties by algorithm name, model
/// id, mode, then grid order) and keeps the first top_n.
std::vector<RunResult> rank_results(std::vector<RunResult> results, std::size_t top_n);

/// Results JSONL, one summary object per run. Timing is omitted unless
/// requested so that files are byte-reproducible.
void write_results_jsonl(std::ostream& out, const std::vector<RunResult>& results,
                         bool include_timing = false);
std::vector<RunResult> read_results_jsonl(std::istream& in);

/// TSV: rank, model_id, mode, algorithm, params, score.
void write_chart_tsv(std::ostream& out, const std::vector<RunResult>& ranked);

}  // namespace normcluster
