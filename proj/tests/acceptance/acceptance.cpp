// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Tolerances are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "normcluster/awh.hpp"
#include "normcluster/classifier.hpp"
#include "normcluster/dbscan.hpp"
#include "normcluster/kmeans.hpp"
#include "normcluster/simd/kernels.hpp"
#include "normcluster/sweep.hpp"
#include "normcluster/text_io.hpp"
#include "oracles.hpp"

using namespace normcluster;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kTable3Tolerance = 0.04;
constexpr double kWorkedExampleBudgetMs = 1.0;
constexpr double kBoundSuiteBudgetMs = 1000.0;
constexpr double kEndToEndBudgetMs = 10000.0;
constexpr std::size_t kKmeansRequiredMatches = 48;
constexpr double kTraceRelativeSlack = 1e-12;
constexpr double kScale = 3.7;
constexpr double kMinEndToEndAwh = 0.2;

const std::string kFixtures = NORMCLUSTER_FIXTURES;
const std::string kConfigs = NORMCLUSTER_CONFIGS;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s  %-24s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt(double v) { return format_double(v); }

ClusterAssignment from_labels(std::vector<ClusterId> labels) {
  ClusterAssignment a;
  ClusterId top = -1;
  for (auto l : labels) top = std::max(top, l);
  a.n_clusters = static_cast<std::size_t>(top + 1);
  a.labels = std::move(labels);
  return a;
}

// 4 x 10 gold labels in category order.
std::vector<Category> four_by_ten() {
  std::vector<Category> cats;
  for (auto c : kNormativeCategories) cats.insert(cats.end(), 10, c);
  return cats;
}

Outcome awh_worked_example() {
  std::vector<Category> members(8, Category::Procedural);
  members.push_back(Category::Rawlsian);
  members.push_back(Category::Libertarian);
  const auto t0 = Clock::now();
  const double v = weighed_homogeneity(members, 40);
  const double ms = ms_since(t0);
  return {v == 0.2 && ms < kWorkedExampleBudgetMs, "value=" + fmt(v) + " time_ms=" + fmt(ms)};
}

Outcome grid_count() {
  const auto grid = generate_grid(load_grid_spec(kConfigs + "/paper_sweep.json"));
  std::size_t dbscan_runs = 0;
  for (const auto& c : grid) dbscan_runs += c.algorithm_name() == "dbscan" ? 1 : 0;
  const std::size_t kmeans_runs = grid.size() - dbscan_runs;
  return {grid.size() == 875 && dbscan_runs == 825 && kmeans_runs == 50,
          "configs=" + std::to_string(grid.size()) + " dbscan=" + std::to_string(dbscan_runs) +
              " kmeans=" + std::to_string(kmeans_runs)};
}

// Builds predictions and gold that realise a (positives, tp, gold) triple.
PrEvaluation evaluate_triple(std::size_t positives, std::size_t tp, std::size_t gold_positives) {
  std::map<std::string, Category> gold;
  std::vector<Prediction> preds;
  for (std::size_t i = 0; i < gold_positives; ++i) gold["g" + std::to_string(i)] = Category::Rawlsian;
  for (std::size_t i = 0; i < tp; ++i) preds.push_back({"g" + std::to_string(i), Category::Rawlsian, 0.9, {}});
  for (std::size_t i = 0; i < positives - tp; ++i) {
    gold["n" + std::to_string(i)] = Category::NonNormative;
    preds.push_back({"n" + std::to_string(i), Category::Procedural, 0.9, {}});
  }
  for (std::size_t i = 0; i < 50; ++i) {
    gold["q" + std::to_string(i)] = Category::NonNormative;
    preds.push_back({"q" + std::to_string(i), Category::NonNormative, 0.1, {}});
  }
  return evaluate(preds, gold);
}

Outcome table3() {
  struct Cell {
    const char* name;
    std::size_t p, tp, g;
    double precision, recall;
    bool recall_exact;
  };
  // The printed 0.3 for 8/24 is the one value allowed to differ at 2 decimals.
  const Cell cells[] = {
      {"distil/art1", 3, 2, 3, 0.67, 0.67, true},   {"distil/art2", 14, 8, 24, 0.57, 0.3, false},
      {"distil/art3", 2, 0, 6, 0.0, 0.0, true},     {"distil/art4", 2, 0, 3, 0.0, 0.0, true},
      {"multi/art1", 4, 3, 3, 0.75, 1.0, true},     {"multi/art2", 22, 11, 24, 0.5, 0.46, true},
      {"multi/art3", 14, 5, 6, 0.36, 0.83, true},   {"multi/art4", 10, 2, 3, 0.2, 0.67, true},
  };
  std::size_t within = 0;
  std::size_t exact = 0;
  std::size_t exact_expected = 0;
  std::string detail;
  for (const auto& c : cells) {
    const auto ev = evaluate_triple(c.p, c.tp, c.g);
    const bool ok_counts = ev.positives == c.p && ev.true_positives == c.tp && ev.gold_positives == c.g;
    const bool p_in = ok_counts && std::abs(ev.precision - c.precision) <= kTable3Tolerance;
    const bool r_in = ok_counts && std::abs(ev.recall - c.recall) <= kTable3Tolerance;
    within += (p_in && r_in) ? 1 : 0;
    ++exact_expected;
    exact += round_two_decimals(ev.precision) == c.precision ? 1 : 0;
    if (c.recall_exact) {
      ++exact_expected;
      exact += round_two_decimals(ev.recall) == c.recall ? 1 : 0;
    }
    if (!(p_in && r_in)) detail += std::string(" off:") + c.name + "=" + ev.summary();
  }
  return {within == 8 && exact == exact_expected && exact_expected == 15,
          "cells_within_tol=" + std::to_string(within) + "/8 exact=" + std::to_string(exact) + "/" +
              std::to_string(exact_expected) + detail};
}

Outcome awh_bounds() {
  const auto cats = four_by_ten();
  const auto t0 = Clock::now();
  std::mt19937_64 rng(500);
  std::size_t in_bounds = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + rng() % 8;
    const bool with_noise = rng() % 2 == 0;
    std::vector<ClusterId> labels(cats.size());
    for (auto& l : labels) {
      l = static_cast<ClusterId>(rng() % (k + (with_noise ? 1 : 0)));
      if (with_noise) --l;
    }
    labels[rng() % labels.size()] = 0;
    const auto s = awh(from_labels(labels), cats);
    const bool ok = s.value > 0.0 && s.value <= 1.0 / static_cast<double>(s.n_clusters);
    in_bounds += ok ? 1 : 0;
  }
  std::vector<ClusterId> perfect;
  for (int c = 0; c < 4; ++c) perfect.insert(perfect.end(), 10, c);
  const double perfect_awh = awh(from_labels(perfect), cats).value;
  const double single_awh = awh(from_labels(std::vector<ClusterId>(40, 0)), cats).value;
  const double ms = ms_since(t0);
  return {in_bounds == 500 && perfect_awh == 0.25 && single_awh == 0.25 && ms < kBoundSuiteBudgetMs,
          "in_bounds=" + std::to_string(in_bounds) + "/500 perfect=" + fmt(perfect_awh) + " single=" +
              fmt(single_awh) + " time_ms=" + fmt(ms)};
}

Outcome kmeans_oracle() {
  std::mt19937_64 rng(2021);
  std::size_t matches = 0;
  std::size_t traces = 0;
  std::size_t monotone = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto rows = oracle::two_blobs(rng, 5);
    std::map<std::size_t, std::vector<double>> trace;
    const auto res = kmeans(Points::from_rows(rows), {.k = 2, .seed = rng(), .restarts = 10},
                            [&](std::size_t r, std::size_t, double inertia) { trace[r].push_back(inertia); });
    const std::vector<int> got(res.labels.begin(), res.labels.end());
    matches += oracle::same_partition(got, oracle::best_two_partition(rows)) ? 1 : 0;
    for (const auto& [r, t] : trace) {
      ++traces;
      bool ok = true;
      for (std::size_t i = 1; i < t.size(); ++i) ok = ok && t[i] <= t[i - 1] * (1.0 + kTraceRelativeSlack);
      monotone += ok ? 1 : 0;
    }
  }
  return {matches >= kKmeansRequiredMatches && traces == 500 && monotone == traces,
          "optimal=" + std::to_string(matches) + "/50 monotone_traces=" + std::to_string(monotone) + "/" +
              std::to_string(traces)};
}

Outcome dbscan_oracle() {
  std::mt19937_64 rng(30);
  std::size_t core_noise_ok = 0;
  std::size_t labels_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    const std::size_t dim = 1 + rng() % 3;
    const auto rows = oracle::uniform_rows(rng, n, dim, 0.0, 10.0);
    const double eps = 0.5 + static_cast<double>(rng() % 50) / 10.0;
    const std::size_t mm = 1 + rng() % 5;
    const auto res = dbscan(Points::from_rows(rows), {.eps = eps, .min_members = mm});
    const auto core = oracle::core_points(rows, eps, mm);
    const auto expected = oracle::dbscan_labels(rows, eps, mm);
    bool noise_same = true;
    for (std::size_t i = 0; i < n; ++i) noise_same = noise_same && ((res.labels[i] == kNoise) == (expected[i] == -1));
    core_noise_ok += (res.core == core && noise_same) ? 1 : 0;
    labels_ok += std::vector<int>(res.labels.begin(), res.labels.end()) == expected ? 1 : 0;
  }
  return {core_noise_ok == 100 && labels_ok == 100,
          "core_noise=" + std::to_string(core_noise_ok) + "/100 labels=" + std::to_string(labels_ok) + "/100"};
}

std::vector<LabeledSample> random_samples(std::mt19937_64& rng, std::size_t n, std::size_t dim, double lo, double hi) {
  std::vector<LabeledSample> out;
  for (auto& row : oracle::uniform_rows(rng, n, dim, lo, hi))
    out.push_back({"t" + std::to_string(out.size()), std::move(row), kNormativeCategories[rng() % 4]});
  return out;
}

Outcome knn_oracle() {
  std::mt19937_64 rng(71);
  std::size_t agree = 0;
  std::size_t total = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 2 + rng() % 10;
    const auto samples = random_samples(rng, 40, dim, -1.0, 1.0);
    const auto model = ClassifierModel::fit(samples, -1.0, 3);
    oracle::Rows train;
    std::vector<Category> labels;
    for (const auto& s : samples) {
      train.push_back(s.vector);
      labels.push_back(s.label);
    }
    for (const auto& q : oracle::uniform_rows(rng, 20, dim, -1.0, 1.0)) {
      ++total;
      agree += predict(model, q).label == oracle::knn_label(train, labels, q, 3) ? 1 : 0;
    }
  }
  return {agree == total, "agree=" + std::to_string(agree) + "/" + std::to_string(total)};
}

Outcome scale_invariance() {
  std::mt19937_64 rng(37);
  const auto samples = random_samples(rng, 40, 8, 0.0, 1.0);
  auto scaled = samples;
  for (auto& s : scaled)
    for (auto& x : s.vector) x *= kScale;
  const auto model = ClassifierModel::fit(samples);
  const auto model_scaled = ClassifierModel::fit(scaled);
  std::size_t same = 0;
  std::size_t gated = 0;
  const auto queries = oracle::uniform_rows(rng, 100, 8, -0.4, 1.0);
  for (auto q : queries) {
    const auto a = predict(model, q);
    for (auto& x : q) x *= kScale;
    const auto b = predict(model_scaled, q);
    same += a.label == b.label ? 1 : 0;
    gated += a.label == Category::NonNormative ? 1 : 0;
  }
  return {same == 100, "unchanged=" + std::to_string(same) + "/100 gated=" + std::to_string(gated)};
}

std::map<std::string, Corpus> fixture_corpora(const GridSpec& spec) {
  std::map<std::string, Corpus> corpora;
  for (const auto& m : spec.models)
    corpora.emplace(m.model_id, load_corpus(kFixtures + "/paper_models/" + m.model_id + ".jsonl"));
  return corpora;
}

Outcome determinism() {
  const auto spec = load_grid_spec(kConfigs + "/paper_sweep.json");
  const auto corpora = fixture_corpora(spec);
  const auto grid = generate_grid(spec);
  std::ostringstream first, second;
  write_results_jsonl(first, run_sweep(corpora, grid, {.workers = spec.workers}));
  write_results_jsonl(second, run_sweep(corpora, grid, {.workers = spec.workers}));
  return {first.str() == second.str() && !first.str().empty(),
          "runs=" + std::to_string(grid.size()) + " bytes=" + std::to_string(first.str().size()) +
              (first.str() == second.str() ? " identical" : " differ")};
}

Outcome end_to_end() {
  const auto t0 = Clock::now();
  GridSpec spec = load_grid_spec(kConfigs + "/paper_sweep.json");
  spec.models = {{"paraphrase-distilroberta-base-v2", ModelFamily::Sbert}};
  const auto corpora = fixture_corpora(spec);
  const auto ranked = rank_results(run_sweep(corpora, generate_grid(spec), {.workers = 1}), 1000);
  const RunResult* top = nullptr;
  for (const auto& r : ranked) {
    const auto* p = std::get_if<KMeansParams>(&r.config.algorithm);
    if (p != nullptr && p->k == 4) {
      top = &r;
      break;
    }
  }
  const double ms = ms_since(t0);
  if (top == nullptr) return {false, "no k-means(k=4) run ranked"};

  std::array<int, kNormativeCategoryCount> majority_of{};
  std::size_t clusters = 0;
  for (const auto& row : top->composition) {
    if (row.is_noise()) continue;
    ++clusters;
    ++majority_of[normative_index(row.majority)];
  }
  bool one_each = clusters == 4;
  for (int m : majority_of) one_each = one_each && m == 1;
  const double score = top->score->value;
  return {score >= kMinEndToEndAwh && one_each && ms < kEndToEndBudgetMs,
          "awh=" + fmt(score) + " one_majority_per_category=" + (one_each ? "yes" : "no") + " time_ms=" + fmt(ms)};
}

}  // namespace

int main() {
  std::printf("kernels: %s\n", std::string(simd::active().name).c_str());
  report("awh-worked-example", awh_worked_example);
  report("grid-count", grid_count);
  report("table3-reproduction", table3);
  report("awh-bounds", awh_bounds);
  report("kmeans-oracle", kmeans_oracle);
  report("dbscan-oracle", dbscan_oracle);
  report("knn-oracle", knn_oracle);
  report("scale-invariance", scale_invariance);
  report("sweep-determinism", determinism);
  report("end-to-end", end_to_end);
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
