#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <unistd.h>

#include "normcluster/cli.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kFixtures = NORMCLUSTER_FIXTURES;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "normcluster");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = normcluster::cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("normcluster_cli_" + std::to_string(::getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"validate", kFixtures + "/paper_models/bert-base-cased.jsonl"}).code == 0);
  CHECK(run({"validate", kFixtures + "/does-not-exist.jsonl"}).code == 1);

  TempDir tmp;
  {
    std::ofstream f(tmp / "bad.jsonl");
    f << R"({"id":"a","text":"t","model_id":"m","sentence_vector":[1,2]})" << '\n'
      << R"({"id":"b","text":"t","model_id":"m","sentence_vector":[1,2,3]})" << '\n';
  }
  const auto bad = run({"validate", tmp / "bad.jsonl"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find(":2") != std::string::npos);
}

TEST_CASE("dry run counts the shipped grid") {
  const auto r = run({"sweep", "--spec", std::string(NORMCLUSTER_CONFIGS) + "/paper_sweep.json", "--dry-run"});
  CHECK(r.code == 0);
  CHECK(r.out == "configs=875 dbscan=825 kmeans=50\n");
}

TEST_CASE("cluster prints a composition table") {
  const auto r = run({"cluster", "--corpus", kFixtures + "/paper_models/paraphrase-distilroberta-base-v2.jsonl",
                      "--algo", "kmeans", "--k", "4", "--seed", "1"});
  CHECK(r.code == 0);
  const auto lines = lines_of(r.out);
  CHECK(lines.size() == 5);
  CHECK(r.err.rfind("awh=", 0) == 0);
  CHECK(run({"cluster", "--corpus", kFixtures + "/paper_models/bert-base-cased.jsonl", "--algo", "spectral"}).code == 1);
}

TEST_CASE("sweep then rank") {
  TempDir tmp;
  {
    std::ofstream f(tmp / "spec.json");
    f << R"({"models":[{"id":"paraphrase-distilroberta-base-v2","family":"sbert"}],
             "dbscan":{"eps":[3.0,4.0,5.0],"min_members":[2]},"kmeans":{"k":[4,5]},"master_seed":3})";
  }
  const auto sweep = run({"sweep", "--spec", tmp / "spec.json", "--corpora", kFixtures + "/paper_models", "--out",
                          tmp / "results.jsonl", "--workers", "2"});
  REQUIRE(sweep.code == 0);
  CHECK(sweep.err.find("runs=5") != std::string::npos);

  const auto ranked = run({"rank", "--results", tmp / "results.jsonl"});
  CHECK(ranked.code == 0);
  const auto lines = lines_of(ranked.out);
  CHECK(lines.size() == 6);
  CHECK(lines[0] == "rank\tmodel_id\tmode\talgorithm\tparams\tscore");
  CHECK(lines_of(run({"rank", "--results", tmp / "results.jsonl", "--top", "2"}).out).size() == 3);
}

TEST_CASE("fit, classify and evaluate the article") {
  TempDir tmp;
  REQUIRE(run({"fit", "--corpus", kFixtures + "/article1/training.jsonl", "--out", tmp / "model.json"}).code == 0);
  REQUIRE(run({"classify", "--model", tmp / "model.json", "--corpus", kFixtures + "/article1/embeddings.jsonl",
               "--out", tmp / "pred.jsonl"})
              .code == 0);
  const auto ev = run({"evaluate", "--predictions", tmp / "pred.jsonl", "--gold", kFixtures + "/article1/gold.tsv"});
  CHECK(ev.code == 0);
  const auto lines = lines_of(ev.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[1] == "article1\t3\t2\t3\t0.67/0.67");
}

TEST_CASE("segment, mine and merge through the CLI") {
  TempDir tmp;
  fs::copy_file(kFixtures + "/article1/training.jsonl", tmp / "training.jsonl");
  REQUIRE(run({"fit", "--corpus", tmp / "training.jsonl", "--out", tmp / "model.json"}).code == 0);
  const auto seg = run({"segment", "--input", kFixtures + "/article1/article1.txt", "--doc-id", "article1", "--out",
                        tmp / "sentences.tsv"});
  REQUIRE(seg.code == 0);
  const auto mined = run({"mine", "--model", tmp / "model.json", "--sentences", tmp / "sentences.tsv", "--embeddings",
                          kFixtures + "/article1/embeddings.jsonl", "--out", tmp / "review.tsv"});
  REQUIRE(mined.code == 0);

  std::ifstream in(tmp / "review.tsv");
  std::stringstream reviewed;
  std::string line;
  std::getline(in, line);
  reviewed << line << '\n';
  while (std::getline(in, line)) {
    const auto tab = line.rfind('\t');
    const bool last_field_blank = tab == line.size() - 1;
    std::string body = last_field_blank ? line.substr(0, tab) : line;
    std::istringstream fields(body);
    std::string id, doc, text, predicted;
    std::getline(fields, id, '\t');
    std::getline(fields, doc, '\t');
    std::getline(fields, text, '\t');
    std::getline(fields, predicted, '\t');
    reviewed << body << '\t' << (id == "article1:30" ? "reject" : "accept:" + predicted) << '\n';
  }
  in.close();
  {
    std::ofstream out(tmp / "review.tsv");
    out << reviewed.str();
  }

  const auto merged = run({"merge", "--training", tmp / "training.jsonl", "--review", tmp / "review.tsv",
                           "--embeddings", kFixtures + "/article1/embeddings.jsonl", "--ledger", tmp / "ledger.jsonl",
                           "--refit-out", tmp / "model2.json"});
  REQUIRE(merged.code == 0);
  CHECK(run({"validate", tmp / "training.jsonl"}).out.find("records=42") != std::string::npos);
  CHECK(lines_of(run({"mine", "--model", tmp / "model2.json", "--sentences", tmp / "sentences.tsv", "--embeddings",
                      kFixtures + "/article1/embeddings.jsonl", "--ledger", tmp / "ledger.jsonl"})
                     .out)
            .size() == 1);

  // Pending verdicts are refused.
  const auto again = run({"merge", "--training", tmp / "training.jsonl", "--review", tmp / "review.tsv",
                          "--embeddings", kFixtures + "/article1/embeddings.jsonl", "--ledger", tmp / "ledger.jsonl"});
  CHECK(again.code == 1);
}
