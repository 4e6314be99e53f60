#include <doctest.h>

#include <random>
#include <sstream>

#include "normcluster/awh.hpp"
#include "normcluster/error.hpp"

using namespace normcluster;

namespace {

constexpr auto D = Category::Deontological;
constexpr auto R = Category::Rawlsian;
constexpr auto P = Category::Procedural;
constexpr auto L = Category::Libertarian;

ClusterAssignment from_labels(std::vector<ClusterId> labels) {
  ClusterAssignment a;
  ClusterId top = -1;
  for (auto l : labels) top = std::max(top, l);
  a.n_clusters = static_cast<std::size_t>(top + 1);
  a.labels = std::move(labels);
  return a;
}

void append(std::vector<ClusterId>& labels, std::vector<Category>& cats, ClusterId c, Category cat, int n) {
  for (int i = 0; i < n; ++i) {
    labels.push_back(c);
    cats.push_back(cat);
  }
}

}  // namespace

TEST_CASE("weighed homogeneity") {
  const std::vector<Category> c1(6, D);
  CHECK(weighed_homogeneity(c1, 10) == doctest::Approx(0.6));
  const std::vector<Category> c2{R, R, L, L};
  CHECK(weighed_homogeneity(c2, 10) == doctest::Approx(0.2));
  CHECK_THROWS_AS(weighed_homogeneity(std::vector<Category>{}, 10), InputError);
  CHECK_THROWS_AS(weighed_homogeneity(c1, 5), InputError);
}

TEST_CASE("two clusters averaged over ten points") {
  std::vector<ClusterId> labels;
  std::vector<Category> cats;
  append(labels, cats, 0, D, 6);
  append(labels, cats, 1, R, 2);
  append(labels, cats, 1, L, 2);
  const auto score = awh(from_labels(labels), cats);
  CHECK(score.value == doctest::Approx(0.4));
  CHECK(score.n_clusters == 2);
  CHECK(score.n_samples == 10);
}

TEST_CASE("perfect four-way partition scores 1/4") {
  std::vector<ClusterId> labels;
  std::vector<Category> cats;
  for (int c = 0; c < 4; ++c) append(labels, cats, c, kNormativeCategories[c], 10);
  CHECK(awh(from_labels(labels), cats).value == doctest::Approx(0.25));
}

TEST_CASE("single homogeneous cluster scores 1, mixed single cluster its majority share") {
  std::vector<ClusterId> labels;
  std::vector<Category> cats;
  append(labels, cats, 0, P, 12);
  CHECK(awh(from_labels(labels), cats).value == doctest::Approx(1.0));
  append(labels, cats, 0, D, 12);
  append(labels, cats, 0, R, 12);
  append(labels, cats, 0, L, 12);
  CHECK(awh(from_labels(labels), cats).value == doctest::Approx(0.25));
}

TEST_CASE("noise counts towards the total") {
  std::vector<ClusterId> labels;
  std::vector<Category> cats;
  append(labels, cats, 0, D, 3);
  append(labels, cats, kNoise, R, 9);
  const auto score = awh(from_labels(labels), cats);
  CHECK(score.value == doctest::Approx(3.0 / 12.0));
  CHECK(score.n_clusters == 1);
}

TEST_CASE("all noise throws") {
  std::vector<ClusterId> labels;
  std::vector<Category> cats;
  append(labels, cats, kNoise, R, 5);
  CHECK_THROWS_AS(awh(from_labels(labels), cats), NoClustersError);
}

TEST_CASE("label count must match") {
  std::vector<ClusterId> labels{0, 0};
  std::vector<Category> cats{D};
  CHECK_THROWS_AS(awh(from_labels(labels), cats), InputError);
}

TEST_CASE("reconstructed four-cluster composition") {
  std::vector<ClusterId> labels;
  std::vector<Category> cats;
  append(labels, cats, 0, P, 9);
  append(labels, cats, 0, R, 1);
  append(labels, cats, 1, R, 8);
  append(labels, cats, 1, L, 2);
  append(labels, cats, 1, D, 1);
  append(labels, cats, 2, D, 7);
  append(labels, cats, 2, P, 1);
  append(labels, cats, 2, L, 1);
  append(labels, cats, 3, L, 7);
  append(labels, cats, 3, D, 2);
  append(labels, cats, 3, R, 1);
  const auto a = from_labels(labels);
  const auto score = awh(a, cats);
  CHECK(score.value == doctest::Approx(31.0 / 160.0));
  CHECK(std::abs(score.value - 0.19) <= 0.005);

  const auto rows = composition_report(a, cats);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].cluster_id == 1);
  CHECK(rows[0].size == 11);
  CHECK(rows[0].majority == R);
  for (const auto& r : rows) {
    std::size_t sum = 0;
    for (auto c : r.counts) sum += c;
    CHECK(sum == r.size);
  }
}

TEST_CASE("composition majority ties go to the lexicographically first category") {
  std::vector<ClusterId> labels;
  std::vector<Category> cats;
  append(labels, cats, 0, R, 3);
  append(labels, cats, 0, P, 3);
  append(labels, cats, kNoise, D, 6);
  const auto rows = composition_report(from_labels(labels), cats);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].cluster_id == 0);
  CHECK(rows[0].majority == P);
  CHECK(rows[1].is_noise());

  std::ostringstream out;
  write_composition_tsv(out, rows);
  const std::string text = out.str();
  CHECK(text.rfind("cluster_id\tsize\t", 0) == 0);
  CHECK(text.find("\nnoise\t6\t") != std::string::npos);
}

TEST_CASE("AWH stays within [0, 1] and at most 1/k for k clusters covering everything") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    const int k = 1 + static_cast<int>(rng() % 6);
    std::vector<ClusterId> labels(n);
    std::vector<Category> cats(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<ClusterId>(rng() % static_cast<unsigned>(k + 1)) - 1;
      cats[i] = kNormativeCategories[rng() % 4];
    }
    labels[0] = 0;
    const auto score = awh(from_labels(labels), cats);
    CHECK(score.value > 0.0);
    CHECK(score.value <= 1.0);
    CHECK(score.value <= 1.0 / static_cast<double>(score.n_clusters) + 1e-12);
  }
}
