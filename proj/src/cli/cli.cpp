#include "normcluster/cli.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "normcluster/awh.hpp"
#include "normcluster/bootstrap.hpp"
#include "normcluster/classifier.hpp"
#include "normcluster/corpus.hpp"
#include "normcluster/dbscan.hpp"
#include "normcluster/error.hpp"
#include "normcluster/kmeans.hpp"
#include "normcluster/sweep.hpp"
#include "normcluster/text_io.hpp"

namespace normcluster::cli {
namespace {

namespace fs = std::filesystem;

/// Writes to the --out file when one was given, otherwise to the default
/// stream. The file is only created once the command has its result.
class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : path_(path), fallback_(fallback) {}

  std::ostream& stream() {
    if (path_.empty()) return fallback_;
    if (!file_.is_open()) {
      file_.open(path_, std::ios::binary | std::ios::trunc);
      if (!file_) throw InputError("cannot write " + path_);
    }
    return file_;
  }

private:
  std::string path_;
  std::ostream& fallback_;
  std::ofstream file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

template <class F>
auto with_path(const std::string& path, F&& read) {
  auto in = open_input(path);
  try {
    return read(in);
  } catch (const ParseError& e) {
    throw ParseError(path, e.line(), e.detail());
  }
}

ExtractionMode mode_from(const std::string& name) {
  const auto m = parse_extraction_mode(name);
  if (!m) throw InputError("unknown extraction mode \"" + name + "\" (FocusWord, TokenMean, SentenceDirect)");
  return *m;
}

FocusWordList focus_words_from(const std::string& path) {
  return path.empty() ? FocusWordList::tax_law_default() : FocusWordList::load(path);
}

std::vector<Category> gold_labels(const Corpus& corpus, const std::string& path) {
  std::vector<Category> labels;
  for (const auto& r : corpus.records) {
    if (!r.label) throw InputError(path + ": record \"" + r.id + "\" has no gold label");
    labels.push_back(*r.label);
  }
  return labels;
}

std::vector<LabeledSample> training_samples(const Corpus& corpus, ExtractionMode mode, const FocusWordList& words,
                                            const std::string& path) {
  std::vector<LabeledSample> samples;
  for (const auto& r : corpus.records) {
    if (!r.label) throw InputError(path + ": training record \"" + r.id + "\" has no label");
    samples.push_back({r.id, resolve_embedding(r, mode, words).vector, *r.label});
  }
  return samples;
}

EmbeddingMap embedding_map(const Corpus& corpus, ExtractionMode mode, const FocusWordList& words) {
  EmbeddingMap map;
  for (const auto& r : corpus.records) map.emplace(r.id, resolve_embedding(r, mode, words).vector);
  return map;
}

std::size_t default_workers(std::size_t from_spec) {
  if (const char* env = std::getenv("NORMCLUSTER_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw InputError("NORMCLUSTER_WORKERS must be a positive integer");
  }
  return from_spec;
}

/// Exclusive advisory lock held for the lifetime of the object.
class FileLock {
public:
  explicit FileLock(const std::string& path) : fd_(::open(path.c_str(), O_RDWR)) {
    if (fd_ < 0) throw InputError("cannot open " + path + " for locking");
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw std::runtime_error("cannot lock " + path);
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

private:
  int fd_;
};

struct Options {
  // shared
  std::string out;
  std::string corpus;
  std::string mode = "SentenceDirect";
  std::string focus_words;
  // validate
  std::vector<std::string> corpora_files;
  // cluster
  std::string algo = "kmeans";
  std::size_t k = 4;
  std::uint64_t seed = 0;
  std::size_t restarts = 10;
  std::size_t max_iter = 300;
  double tol = 1e-4;
  double eps = 2.0;
  std::size_t min_members = 2;
  // sweep
  std::string spec;
  std::string corpora_dir;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> master_seed;
  bool dry_run = false;
  bool timing = false;
  // rank
  std::string results;
  std::size_t top = 20;
  // fit / classify
  double threshold = kDefaultGateThreshold;
  std::size_t neighbours = kDefaultNeighbours;
  std::string model;
  // evaluate
  std::string predictions;
  std::string gold;
  // segment / mine / merge
  std::string input;
  std::string doc_id;
  std::string sentences;
  std::string embeddings;
  std::string ledger;
  std::string training;
  std::string review;
  std::string refit_out;
};

int run_validate(const Options& o, std::ostream& out) {
  for (const auto& path : o.corpora_files) {
    const Corpus c = with_path(path, [](std::istream& in) { return parse_corpus(in); });
    std::size_t labeled = 0;
    for (const auto& r : c.records) labeled += r.label ? 1 : 0;
    out << path << "\trecords=" << c.size() << "\tdim=" << (c.dim ? std::to_string(*c.dim) : "-")
        << "\tlabeled=" << labeled << "\ttokens=" << (c.has_tokens() ? "yes" : "no") << '\n';
  }
  return 0;
}

int run_cluster(const Options& o, std::ostream& out, std::ostream& err) {
  const Corpus corpus = with_path(o.corpus, [](std::istream& in) { return parse_corpus(in); });
  const auto labels = gold_labels(corpus, o.corpus);
  const auto resolved = resolve_corpus(corpus, mode_from(o.mode), focus_words_from(o.focus_words));
  ClusterAssignment a;
  if (o.algo == "kmeans") {
    a = kmeans(resolved.points, KMeansParams{o.k, o.seed, o.restarts, o.max_iter, o.tol});
  } else if (o.algo == "dbscan") {
    a = dbscan(resolved.points, DbscanParams{o.eps, o.min_members});
  } else {
    throw InputError("unknown algorithm \"" + o.algo + "\" (kmeans, dbscan)");
  }
  Sink sink(o.out, out);
  write_composition_tsv(sink.stream(), composition_report(a, labels));
  try {
    const AwhScore s = awh(a, labels);
    err << "awh=" << format_double(s.value) << " clusters=" << s.n_clusters << " samples=" << s.n_samples
        << " noise=" << a.noise_count() << '\n';
  } catch (const NoClustersError&) {
    err << "awh=0 clusters=0 samples=" << labels.size() << " noise=" << a.noise_count() << '\n';
  }
  for (const auto& id : resolved.fallback_ids) err << "focus-word fallback: " << id << '\n';
  return 0;
}

int run_sweep_cmd(const Options& o, std::ostream& out, std::ostream& err) {
  GridSpec spec = load_grid_spec(o.spec);
  if (o.master_seed) spec.master_seed = *o.master_seed;
  const auto grid = generate_grid(spec);
  std::size_t n_kmeans = 0;
  for (const auto& c : grid) n_kmeans += c.algorithm_name() == "kmeans" ? 1 : 0;
  if (o.dry_run) {
    out << "configs=" << grid.size() << " dbscan=" << grid.size() - n_kmeans << " kmeans=" << n_kmeans << '\n';
    return 0;
  }
  if (o.corpora_dir.empty()) throw InputError("sweep: --corpora is required unless --dry-run is given");
  std::map<std::string, Corpus> corpora;
  for (const auto& m : spec.models) {
    const fs::path path = fs::path(o.corpora_dir) / (m.model_id + ".jsonl");
    if (!fs::exists(path)) throw InputError("sweep: missing corpus " + path.string());
    corpora.emplace(m.model_id, with_path(path.string(), [](std::istream& in) { return parse_corpus(in); }));
  }
  SweepOptions opts;
  opts.workers = o.workers.value_or(default_workers(spec.workers));
  if (spec.focus_words) opts.focus_words = FocusWordList(*spec.focus_words);
  if (!o.focus_words.empty()) opts.focus_words = FocusWordList::load(o.focus_words);
  const auto results = run_sweep(corpora, grid, opts);
  Sink sink(o.out, out);
  write_results_jsonl(sink.stream(), results, o.timing);
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.ok() ? 0 : 1;
  err << "runs=" << results.size() << " failed=" << failed << '\n';
  return 0;
}

int run_rank(const Options& o, std::ostream& out) {
  auto results = with_path(o.results, [](std::istream& in) { return read_results_jsonl(in); });
  Sink sink(o.out, out);
  write_chart_tsv(sink.stream(), rank_results(std::move(results), o.top));
  return 0;
}

int run_fit(const Options& o, std::ostream& out) {
  const Corpus corpus = with_path(o.corpus, [](std::istream& in) { return parse_corpus(in); });
  auto samples = training_samples(corpus, mode_from(o.mode), focus_words_from(o.focus_words), o.corpus);
  const std::string model_id = corpus.records.empty() ? std::string{} : corpus.records.front().model_id;
  const auto model = ClassifierModel::fit(std::move(samples), o.threshold, o.neighbours, model_id);
  Sink sink(o.out, out);
  model.save(sink.stream());
  return 0;
}

int run_classify(const Options& o, std::ostream& out) {
  const auto model = with_path(o.model, [](std::istream& in) { return ClassifierModel::load(in); });
  const Corpus corpus = with_path(o.corpus, [](std::istream& in) { return parse_corpus(in); });
  const auto mode = mode_from(o.mode);
  const auto words = focus_words_from(o.focus_words);
  std::vector<Prediction> preds;
  std::map<std::string, std::string> doc_of;
  for (const auto& r : corpus.records) {
    preds.push_back(predict(model, resolve_embedding(r, mode, words).vector, r.id));
    if (r.source_doc) doc_of[r.id] = *r.source_doc;
  }
  Sink sink(o.out, out);
  write_predictions_jsonl(sink.stream(), preds, doc_of);
  return 0;
}

int run_evaluate(const Options& o, std::ostream& out) {
  const auto preds = with_path(o.predictions, [](std::istream& in) { return read_predictions_jsonl(in); });
  const auto gold = with_path(o.gold, [](std::istream& in) { return read_gold_tsv(in); });
  // Group by document; the gold set of a document is restricted to the ids
  // predicted for it.
  std::map<std::string, std::vector<Prediction>> by_doc;
  std::vector<std::string> order;
  for (const auto& d : preds) {
    const std::string doc = d.doc.value_or("all");
    if (!by_doc.contains(doc)) order.push_back(doc);
    by_doc[doc].push_back(d.prediction);
  }
  Sink sink(o.out, out);
  auto& s = sink.stream();
  s << "document\tpositives\ttrue_positives\tgold_positives\tprecision/recall\n";
  for (const auto& doc : order) {
    std::map<std::string, Category> doc_gold;
    for (const auto& p : by_doc[doc]) {
      const auto it = gold.find(p.record_id);
      if (it == gold.end()) throw InputError("evaluate: no gold label for \"" + p.record_id + "\"");
      doc_gold.insert(*it);
    }
    const auto e = evaluate(by_doc[doc], doc_gold);
    s << doc << '\t' << e.positives << '\t' << e.true_positives << '\t' << e.gold_positives << '\t' << e.summary()
      << '\n';
  }
  return 0;
}

int run_segment(const Options& o, std::ostream& out) {
  auto in = open_input(o.input);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string doc_id = o.doc_id.empty() ? fs::path(o.input).stem().string() : o.doc_id;
  const auto doc = segment(ss.str(), doc_id);
  Sink sink(o.out, out);
  write_sentences_tsv(sink.stream(), doc);
  return 0;
}

int run_mine(const Options& o, std::ostream& out) {
  const auto model = with_path(o.model, [](std::istream& in) { return ClassifierModel::load(in); });
  const auto doc = with_path(o.sentences, [](std::istream& in) { return read_sentences_tsv(in); });
  const Corpus emb = with_path(o.embeddings, [](std::istream& in) { return parse_corpus(in); });
  RejectionLedger ledger;
  if (!o.ledger.empty() && fs::exists(o.ledger)) {
    ledger = with_path(o.ledger, [](std::istream& in) { return RejectionLedger::load(in); });
  }
  const auto batch = mine(model, doc, embedding_map(emb, mode_from(o.mode), focus_words_from(o.focus_words)), &ledger);
  Sink sink(o.out, out);
  write_review_tsv(sink.stream(), batch);
  return 0;
}

int run_merge(const Options& o, std::ostream& out, std::ostream& err) {
  const auto batch = with_path(o.review, [](std::istream& in) { return read_review_tsv(in); });
  const Corpus emb = with_path(o.embeddings, [](std::istream& in) { return parse_corpus(in); });
  const auto mode = mode_from(o.mode);
  const auto words = focus_words_from(o.focus_words);

  FileLock lock(o.training);
  const Corpus training = with_path(o.training, [](std::istream& in) { return parse_corpus(in); });
  RejectionLedger ledger;
  if (fs::exists(o.ledger)) ledger = with_path(o.ledger, [](std::istream& in) { return RejectionLedger::load(in); });

  const auto outcome = merge_reviews(training_samples(training, mode, words, o.training), batch,
                                     embedding_map(emb, mode, words), ledger);

  // Only after validation succeeded: append accepted records and rejections.
  {
    std::ofstream train_out(o.training, std::ios::binary | std::ios::app);
    if (!train_out) throw InputError("cannot append to " + o.training);
    for (const auto& e : batch.entries) {
      if (e.verdict.kind != VerdictKind::Accepted) continue;
      EmbeddingRecord rec = emb.records[*emb.find(e.sentence_id)];
      rec.label = e.verdict.category;
      rec.source_doc = e.doc_id;
      write_record(train_out, rec);
    }
  }
  {
    std::ofstream ledger_out(o.ledger, std::ios::binary | std::ios::app);
    if (!ledger_out) throw InputError("cannot append to " + o.ledger);
    for (const auto& e : batch.entries) {
      if (e.verdict.kind == VerdictKind::Rejected) RejectionLedger::append(ledger_out, e);
    }
  }
  if (!o.refit_out.empty()) {
    const auto model = ClassifierModel::fit(outcome.training, o.threshold, o.neighbours,
                                            training.records.empty() ? std::string{} : training.records.front().model_id);
    Sink sink(o.refit_out, out);
    model.save(sink.stream());
  }
  err << "accepted=" << outcome.accepted << " rejected=" << outcome.rejected
      << " training=" << outcome.training.size() << '\n';
  return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cluster, score and classify embedded normative statements", "normcluster"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check corpus JSONL files");
  validate->add_option("corpora", o.corpora_files, "Corpus files")->required()->check(CLI::ExistingFile);

  auto* cluster = app.add_subcommand("cluster", "Cluster one corpus and print its composition TSV");
  cluster->add_option("--corpus", o.corpus)->required()->check(CLI::ExistingFile);
  cluster->add_option("--mode", o.mode, "FocusWord | TokenMean | SentenceDirect");
  cluster->add_option("--algo", o.algo, "kmeans | dbscan");
  cluster->add_option("--k", o.k);
  cluster->add_option("--seed", o.seed);
  cluster->add_option("--restarts", o.restarts);
  cluster->add_option("--max-iter", o.max_iter);
  cluster->add_option("--tol", o.tol);
  cluster->add_option("--eps", o.eps);
  cluster->add_option("--min-members", o.min_members);
  cluster->add_option("--focus-words", o.focus_words)->check(CLI::ExistingFile);
  cluster->add_option("--out", o.out);

  auto* sweep = app.add_subcommand("sweep", "Run the full configuration grid");
  sweep->add_option("--spec", o.spec)->required()->check(CLI::ExistingFile);
  sweep->add_option("--corpora", o.corpora_dir, "Directory holding <model_id>.jsonl")->check(CLI::ExistingDirectory);
  sweep->add_option("--out", o.out);
  sweep->add_option("--workers", o.workers)->check(CLI::PositiveNumber);
  sweep->add_option("--seed", o.master_seed, "Override the spec's master_seed");
  sweep->add_option("--focus-words", o.focus_words)->check(CLI::ExistingFile);
  sweep->add_flag("--dry-run", o.dry_run, "Print the config count and exit");
  sweep->add_flag("--timing", o.timing, "Include wall time per run in the results");

  auto* rank = app.add_subcommand("rank", "Rank sweep results into chart TSV");
  rank->add_option("--results", o.results)->required()->check(CLI::ExistingFile);
  rank->add_option("--top", o.top);
  rank->add_option("--out", o.out);

  auto* fit = app.add_subcommand("fit", "Fit the gated kNN classifier on a labeled corpus");
  fit->add_option("--corpus", o.corpus)->required()->check(CLI::ExistingFile);
  fit->add_option("--mode", o.mode);
  fit->add_option("--threshold", o.threshold);
  fit->add_option("--k", o.neighbours);
  fit->add_option("--focus-words", o.focus_words)->check(CLI::ExistingFile);
  fit->add_option("--out", o.out);

  auto* classify = app.add_subcommand("classify", "Predict a category for every record of a corpus");
  classify->add_option("--model", o.model)->required()->check(CLI::ExistingFile);
  classify->add_option("--corpus", o.corpus)->required()->check(CLI::ExistingFile);
  classify->add_option("--mode", o.mode);
  classify->add_option("--focus-words", o.focus_words)->check(CLI::ExistingFile);
  classify->add_option("--out", o.out);

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Per-document precision/recall of predictions");
  evaluate_cmd->add_option("--predictions", o.predictions)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--gold", o.gold)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--out", o.out);

  auto* segment_cmd = app.add_subcommand("segment", "Split a text document into sentences");
  segment_cmd->add_option("--input", o.input)->required()->check(CLI::ExistingFile);
  segment_cmd->add_option("--doc-id", o.doc_id);
  segment_cmd->add_option("--out", o.out);

  auto* mine_cmd = app.add_subcommand("mine", "Export classifier positives for expert review");
  mine_cmd->add_option("--model", o.model)->required()->check(CLI::ExistingFile);
  mine_cmd->add_option("--sentences", o.sentences)->required()->check(CLI::ExistingFile);
  mine_cmd->add_option("--embeddings", o.embeddings)->required()->check(CLI::ExistingFile);
  mine_cmd->add_option("--mode", o.mode);
  mine_cmd->add_option("--focus-words", o.focus_words)->check(CLI::ExistingFile);
  mine_cmd->add_option("--ledger", o.ledger, "Rejection ledger JSONL");
  mine_cmd->add_option("--out", o.out);

  auto* merge_cmd = app.add_subcommand("merge", "Fold reviewed verdicts into the training set");
  merge_cmd->add_option("--training", o.training)->required()->check(CLI::ExistingFile);
  merge_cmd->add_option("--review", o.review)->required()->check(CLI::ExistingFile);
  merge_cmd->add_option("--embeddings", o.embeddings)->required()->check(CLI::ExistingFile);
  merge_cmd->add_option("--ledger", o.ledger)->required();
  merge_cmd->add_option("--mode", o.mode);
  merge_cmd->add_option("--focus-words", o.focus_words)->check(CLI::ExistingFile);
  merge_cmd->add_option("--refit-out", o.refit_out, "Write a classifier refitted on the merged set");
  merge_cmd->add_option("--threshold", o.threshold);
  merge_cmd->add_option("--k", o.neighbours);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*validate) return run_validate(o, out);
    if (*cluster) return run_cluster(o, out, err);
    if (*sweep) return run_sweep_cmd(o, out, err);
    if (*rank) return run_rank(o, out);
    if (*fit) return run_fit(o, out);
    if (*classify) return run_classify(o, out);
    if (*evaluate_cmd) return run_evaluate(o, out);
    if (*segment_cmd) return run_segment(o, out);
    if (*mine_cmd) return run_mine(o, out);
    if (*merge_cmd) return run_merge(o, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace normcluster::cli
