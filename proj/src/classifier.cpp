#include "normcluster/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "normcluster/error.hpp"
#include "normcluster/simd/kernels.hpp"
#include "normcluster/text_io.hpp"

namespace normcluster {

using nlohmann::json;

ClassifierModel ClassifierModel::fit(std::vector<LabeledSample> samples, double gate_threshold,
                                     std::size_t k, std::string model_id) {
  if (samples.empty()) throw InputError("classifier: no training samples");
  if (!(gate_threshold >= -1.0 && gate_threshold <= 1.0)) {
    throw InputError("classifier: gate threshold must lie in [-1, 1]");
  }
  if (k == 0 || k % 2 == 0) throw InputError("classifier: k must be a positive odd integer");
  if (k > samples.size()) {
    throw InputError("classifier: k = " + std::to_string(k) + " exceeds the " +
                     std::to_string(samples.size()) + " training samples");
  }

  ClassifierModel m;
  const std::size_t dim = samples.front().vector.size();
  if (dim == 0) throw InputError("classifier: training vectors are empty");
  m.matrix_ = Points(dim);
  m.centroid_.assign(dim, 0.0);
  for (const auto& s : samples) {
    if (!is_normative(s.label)) {
      throw InputError("classifier: training sample \"" + s.id + "\" is labeled NonNormative");
    }
    if (s.vector.size() != dim) {
      throw InputError("classifier: training sample \"" + s.id + "\" has dimension " +
                       std::to_string(s.vector.size()) + ", expected " + std::to_string(dim));
    }
    const double norm = std::sqrt(simd::norm_squared(s.vector));
    if (norm == 0.0) throw InputError("classifier: training sample \"" + s.id + "\" is the zero vector");
    m.matrix_.push_back(s.vector);
    m.norms_.push_back(norm);
    simd::accumulate(m.centroid_, s.vector);
  }
  const double n = static_cast<double>(samples.size());
  for (double& x : m.centroid_) x /= n;
  m.training_ = std::move(samples);
  m.gate_threshold_ = gate_threshold;
  m.k_ = k;
  m.model_id_ = std::move(model_id);
  return m;
}

ClassifierModel ClassifierModel::with_gate(double gate_threshold) const {
  if (!(gate_threshold >= -1.0 && gate_threshold <= 1.0)) {
    throw InputError("classifier: gate threshold must lie in [-1, 1]");
  }
  ClassifierModel copy = *this;
  copy.gate_threshold_ = gate_threshold;
  return copy;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("cosine: dimension mismatch");
  const double na = std::sqrt(simd::norm_squared(a));
  const double nb = std::sqrt(simd::norm_squared(b));
  if (na == 0.0 || nb == 0.0) throw InputError("cosine similarity of a zero vector is undefined");
  return simd::dot(a, b) / (na * nb);
}

Prediction predict(const ClassifierModel& model, std::span<const double> query, std::string record_id) {
  if (query.size() != model.dim()) {
    throw InputError("classifier: query \"" + record_id + "\" has dimension " + std::to_string(query.size()) +
                     ", model expects " + std::to_string(model.dim()));
  }
  const double qn = std::sqrt(simd::norm_squared(query));
  if (qn == 0.0) throw InputError("classifier: query \"" + record_id + "\" is the zero vector");

  Prediction p;
  p.record_id = std::move(record_id);
  p.gate_similarity = cosine_similarity(query, model.centroid());
  if (p.gate_similarity < model.gate_threshold()) {
    p.label = Category::NonNormative;
    return p;
  }

  const auto& train = model.training_points();
  const auto& norms = model.training_norms();
  const auto& kernels = simd::active();
  std::vector<double> dist(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    dist[i] = 1.0 - kernels.dot(query.data(), train[i].data(), query.size()) / (qn * norms[i]);
  }
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t k = model.k();
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) { return dist[a] != dist[b] ? dist[a] < dist[b] : a < b; });

  std::array<std::size_t, kNormativeCategoryCount> votes{};
  for (std::size_t r = 0; r < k; ++r) {
    const auto& s = model.training()[order[r]];
    ++votes[normative_index(s.label)];
    p.neighbor_ids.push_back(s.id);
  }
  const std::size_t top = *std::max_element(votes.begin(), votes.end());
  // Plurality; on a tie the nearest neighbour among the tied categories decides.
  for (std::size_t r = 0; r < k; ++r) {
    const Category c = model.training()[order[r]].label;
    if (votes[normative_index(c)] == top) {
      p.label = c;
      break;
    }
  }
  return p;
}

PrEvaluation PrEvaluation::from_counts(std::size_t positives, std::size_t true_positives,
                                       std::size_t gold_positives) {
  if (true_positives > positives || true_positives > gold_positives) {
    throw InputError("true positives exceed positives or gold positives");
  }
  PrEvaluation e;
  e.positives = positives;
  e.true_positives = true_positives;
  e.gold_positives = gold_positives;
  e.precision = positives == 0 ? 0.0 : static_cast<double>(true_positives) / static_cast<double>(positives);
  e.recall = gold_positives == 0 ? 0.0 : static_cast<double>(true_positives) / static_cast<double>(gold_positives);
  return e;
}

std::string PrEvaluation::summary() const {
  return format_two_decimals(precision) + "/" + format_two_decimals(recall);
}

PrEvaluation evaluate(const std::vector<Prediction>& predictions, const std::map<std::string, Category>& gold) {
  std::size_t positives = 0;
  std::size_t tp = 0;
  for (const auto& p : predictions) {
    const auto it = gold.find(p.record_id);
    if (it == gold.end()) throw InputError("evaluate: no gold label for \"" + p.record_id + "\"");
    if (!is_normative(p.label)) continue;
    ++positives;
    if (it->second == p.label) ++tp;
  }
  const auto gold_pos = static_cast<std::size_t>(
      std::count_if(gold.begin(), gold.end(), [](const auto& kv) { return is_normative(kv.second); }));
  return PrEvaluation::from_counts(positives, tp, gold_pos);
}

std::vector<GateCalibrationRow> calibrate_gate(const ClassifierModel& model, const Points& queries,
                                               const std::vector<double>& thresholds) {
  std::vector<double> sims;
  sims.reserve(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) sims.push_back(cosine_similarity(queries[i], model.centroid()));
  std::vector<GateCalibrationRow> rows;
  for (double t : thresholds) {
    const auto n = static_cast<std::size_t>(std::count_if(sims.begin(), sims.end(), [t](double s) { return !(s < t); }));
    rows.push_back({t, n});
  }
  return rows;
}

void ClassifierModel::save(std::ostream& out) const {
  json j;
  j["model_id"] = model_id_;
  j["gate_threshold"] = gate_threshold_;
  j["k"] = k_;
  j["centroid"] = centroid_;
  json train = json::array();
  for (const auto& s : training_) {
    train.push_back({{"id", s.id}, {"label", std::string(to_string(s.label))}, {"vector", s.vector}});
  }
  j["training"] = std::move(train);
  out << j.dump() << '\n';
}

ClassifierModel ClassifierModel::load(std::istream& in) {
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const json j = json::parse(ss.str());
    std::vector<LabeledSample> samples;
    for (const auto& t : j.at("training")) {
      const auto label = parse_category(t.at("label").get<std::string>());
      if (!label) throw InputError("classifier model: unknown label");
      samples.push_back({t.at("id").get<std::string>(), t.at("vector").get<Vector>(), *label});
    }
    return fit(std::move(samples), j.at("gate_threshold").get<double>(), j.at("k").get<std::size_t>(),
               j.value("model_id", std::string{}));
  } catch (const json::exception& e) {
    throw InputError(std::string("classifier model: ") + e.what());
  }
}

void write_predictions_jsonl(std::ostream& out, const std::vector<Prediction>& predictions,
                             const std::map<std::string, std::string>& doc_of) {
  for (const auto& p : predictions) {
    json j;
    j["record_id"] = p.record_id;
    if (const auto it = doc_of.find(p.record_id); it != doc_of.end()) j["doc"] = it->second;
    j["label"] = std::string(to_string(p.label));
    j["gate_similarity"] = p.gate_similarity;
    j["neighbor_ids"] = p.neighbor_ids;
    out << j.dump() << '\n';
  }
}

std::vector<DocPrediction> read_predictions_jsonl(std::istream& in) {
  std::vector<DocPrediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = chomp(line);
    if (body.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      const json j = json::parse(body);
      DocPrediction d;
      d.prediction.record_id = j.at("record_id").get<std::string>();
      const auto label = parse_category(j.at("label").get<std::string>());
      if (!label) throw ParseError(line_no, "unknown label");
      d.prediction.label = *label;
      d.prediction.gate_similarity = j.value("gate_similarity", 0.0);
      d.prediction.neighbor_ids = j.value("neighbor_ids", std::vector<std::string>{});
      if (const auto it = j.find("doc"); it != j.end() && it->is_string()) d.doc = it->get<std::string>();
      out.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("malformed prediction: ") + e.what());
    }
  }
  return out;
}

std::map<std::string, Category> read_gold_tsv(std::istream& in) {
  std::map<std::string, Category> gold;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = chomp(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_tsv(body);
    if (fields.size() < 2) throw ParseError(line_no, "expected record_id<TAB>category");
    const auto cat = parse_category(fields[1]);
    if (!cat) throw ParseError(line_no, "unknown category \"" + fields[1] + "\"");
    if (!gold.emplace(fields[0], *cat).second) throw ParseError(line_no, "duplicate id \"" + fields[0] + "\"");
  }
  return gold;
}

}  // namespace normcluster
