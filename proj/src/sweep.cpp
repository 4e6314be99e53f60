#include "normcluster/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "normcluster/error.hpp"
#include "normcluster/rng.hpp"
#include "normcluster/text_io.hpp"

namespace normcluster {

using nlohmann::json;

std::string_view to_string(ModelFamily f) noexcept {
  switch (f) {
    case ModelFamily::Word: return "word";
    case ModelFamily::Sbert: return "sbert";
    case ModelFamily::Classical: return "classical";
  }
  return "?";
}

std::optional<ModelFamily> parse_model_family(std::string_view name) noexcept {
  for (auto f : {ModelFamily::Word, ModelFamily::Sbert, ModelFamily::Classical}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

std::vector<ExtractionMode> modes_for(ModelFamily f) {
  if (f == ModelFamily::Word) return {ExtractionMode::FocusWord, ExtractionMode::TokenMean};
  return {ExtractionMode::SentenceDirect};
}

namespace {

template <class T>
std::vector<T> number_list(const json& section, const char* key, const char* where) {
  const auto it = section.find(key);
  if (it == section.end() || !it->is_array()) {
    throw InputError(std::string("sweep spec: ") + where + "." + key + " must be an array");
  }
  std::vector<T> out;
  for (const auto& v : *it) {
    if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw InputError(std::string("sweep spec: ") + where + "." + key + " must hold numbers");
    } else {
      if (!v.is_number_unsigned()) {
        throw InputError(std::string("sweep spec: ") + where + "." + key + " must hold positive integers");
      }
    }
    out.push_back(v.get<T>());
  }
  return out;
}

std::string describe(const json::exception& e) { return std::string("sweep spec: ") + e.what(); }

}  // namespace

GridSpec parse_grid_spec(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(describe(e));
  }
  if (!j.is_object()) throw InputError("sweep spec: top level must be an object");
  GridSpec spec;
  try {
    const auto models = j.find("models");
    if (models == j.end() || !models->is_array()) throw InputError("sweep spec: \"models\" must be an array");
    for (const auto& m : *models) {
      const std::string fam = m.at("family").get<std::string>();
      const auto family = parse_model_family(fam);
      if (!family) throw InputError("sweep spec: unknown model family \"" + fam + "\"");
      spec.models.push_back({m.at("id").get<std::string>(), *family});
    }
    if (const auto it = j.find("dbscan"); it != j.end()) {
      spec.eps = number_list<double>(*it, "eps", "dbscan");
      spec.min_members = number_list<std::size_t>(*it, "min_members", "dbscan");
    }
    if (const auto it = j.find("kmeans"); it != j.end()) {
      spec.k = number_list<std::size_t>(*it, "k", "kmeans");
      spec.restarts = it->value("restarts", spec.restarts);
      spec.max_iter = it->value("max_iter", spec.max_iter);
      spec.tol = it->value("tol", spec.tol);
    }
    spec.master_seed = j.value("master_seed", spec.master_seed);
    spec.workers = j.value("workers", spec.workers);
    if (const auto it = j.find("focus_words"); it != j.end()) {
      spec.focus_words = it->get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw InputError(describe(e));
  }
  return spec;
}

GridSpec load_grid_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open sweep spec " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_grid_spec(ss.str());
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

std::string_view RunConfig::algorithm_name() const noexcept {
  return std::holds_alternative<KMeansParams>(algorithm) ? "kmeans" : "dbscan";
}

std::string RunConfig::params_string() const {
  if (const auto* km = std::get_if<KMeansParams>(&algorithm)) return "k=" + std::to_string(km->k);
  const auto& db = std::get<DbscanParams>(algorithm);
  return "eps=" + format_double(db.eps) + ",min_members=" + std::to_string(db.min_members);
}

namespace {

void validate(const GridSpec& spec) {
  if (spec.models.empty()) throw InputError("sweep spec: model list is empty");
  if (!spec.k && !spec.eps) throw InputError("sweep spec: neither dbscan nor kmeans parameters given");
  if (spec.eps && (spec.eps->empty() || !spec.min_members || spec.min_members->empty())) {
    throw InputError("sweep spec: dbscan parameter lists must be non-empty");
  }
  if (spec.k && spec.k->empty()) throw InputError("sweep spec: kmeans.k must be non-empty");
  if (spec.eps) {
    for (double e : *spec.eps) {
      if (!(e > 0.0)) throw InputError("sweep spec: eps values must be positive");
    }
    for (auto m : *spec.min_members) {
      if (m == 0) throw InputError("sweep spec: min_members values must be >= 1");
    }
  }
  if (spec.k) {
    for (auto k : *spec.k) {
      if (k == 0) throw InputError("sweep spec: k values must be >= 1");
    }
  }
}

std::size_t source_count(const GridSpec& spec) {
  std::size_t n = 0;
  for (const auto& m : spec.models) n += modes_for(m.family).size();
  return n;
}

}  // namespace

std::size_t grid_size(const GridSpec& spec) {
  validate(spec);
  const std::size_t dbscan = spec.eps ? spec.eps->size() * spec.min_members->size() : 0;
  const std::size_t kmeans = spec.k ? spec.k->size() : 0;
  return source_count(spec) * (dbscan + kmeans);
}

std::vector<RunConfig> generate_grid(const GridSpec& spec) {
  validate(spec);
  std::vector<RunConfig> grid;
  grid.reserve(grid_size(spec));
  auto for_each_source = [&](auto&& emit) {
    for (const auto& m : spec.models) {
      for (auto mode : modes_for(m.family)) emit(m, mode);
    }
  };
  auto push = [&](const ModelSource& m, ExtractionMode mode, AlgorithmParams params) {
    RunConfig cfg;
    cfg.index = grid.size();
    cfg.model_id = m.model_id;
    cfg.family = m.family;
    cfg.mode = mode;
    if (auto* km = std::get_if<KMeansParams>(&params)) km->seed = splitmix64(spec.master_seed + cfg.index);
    cfg.algorithm = params;
    grid.push_back(std::move(cfg));
  };
  if (spec.eps) {
    for_each_source([&](const ModelSource& m, ExtractionMode mode) {
      for (double eps : *spec.eps) {
        for (auto mm : *spec.min_members) push(m, mode, DbscanParams{eps, mm});
      }
    });
  }
  if (spec.k) {
    for_each_source([&](const ModelSource& m, ExtractionMode mode) {
      for (auto k : *spec.k) {
        KMeansParams p;
        p.k = k;
        p.restarts = spec.restarts;
        p.max_iter = spec.max_iter;
        p.tol = spec.tol;
        push(m, mode, p);
      }
    });
  }
  return grid;
}

namespace {

struct PreparedSource {
  std::optional<Points> points;
  std::string error;
};

using SourceKey = std::pair<std::string, ExtractionMode>;

RunResult execute(const RunConfig& cfg, const PreparedSource& src, const std::vector<Category>& labels) {
  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  result.config = cfg;
  try {
    if (!src.points) throw InputError(src.error);
    ClusterAssignment a = std::holds_alternative<KMeansParams>(cfg.algorithm)
                              ? kmeans(*src.points, std::get<KMeansParams>(cfg.algorithm))
                              : dbscan(*src.points, std::get<DbscanParams>(cfg.algorithm));
    result.noise = a.noise_count();
    result.composition = composition_report(a, labels);
    result.score = awh(a, labels);
  } catch (const std::exception& e) {
    result.score.reset();
    result.failure = e.what();
  }
  result.wall_time = std::chrono::steady_clock::now() - start;
  return result;
}

}  // namespace

std::vector<RunResult> run_sweep(const std::map<std::string, Corpus>& corpora,
                                 const std::vector<RunConfig>& grid, const SweepOptions& options) {
  std::map<std::string, std::vector<Category>> labels;
  std::map<SourceKey, PreparedSource> sources;
  for (const auto& cfg : grid) {
    const auto it = corpora.find(cfg.model_id);
    if (it == corpora.end()) throw InputError("no corpus for model \"" + cfg.model_id + "\"");
    const Corpus& corpus = it->second;
    if (!labels.contains(cfg.model_id)) {
      if (corpus.records.empty()) throw InputError("corpus for model \"" + cfg.model_id + "\" is empty");
      if (!corpus.fully_labeled()) {
        throw InputError("corpus for model \"" + cfg.model_id + "\" has records without a gold label");
      }
      auto& l = labels[cfg.model_id];
      for (const auto& r : corpus.records) l.push_back(*r.label);
    }
    const SourceKey key{cfg.model_id, cfg.mode};
    if (sources.contains(key)) continue;
    PreparedSource src;
    try {
      src.points = resolve_corpus(corpus, cfg.mode, options.focus_words).points;
    } catch (const std::exception& e) {
      src.error = e.what();
    }
    sources.emplace(key, std::move(src));
  }

  std::vector<RunResult> results(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
      const auto& cfg = grid[i];
      results[i] = execute(cfg, sources.at({cfg.model_id, cfg.mode}), labels.at(cfg.model_id));
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(grid.size(), 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return results;
}

std::vector<RunResult> rank_results(std::vector<RunResult> results, std::size_t top_n) {
  std::erase_if(results, [](const RunResult& r) { return !r.ok(); });
  std::stable_sort(results.begin(), results.end(), [](const RunResult& a, const RunResult& b) {
    if (a.score->value != b.score->value) return a.score->value > b.score->value;
    const auto ka = std::tuple(a.config.algorithm_name(), std::string_view(a.config.model_id),
                               to_string(a.config.mode));
    const auto kb = std::tuple(b.config.algorithm_name(), std::string_view(b.config.model_id),
                               to_string(b.config.mode));
    if (ka != kb) return ka < kb;
    return a.config.index < b.config.index;
  });
  if (results.size() > top_n) results.resize(top_n);
  return results;
}

namespace {

json params_json(const RunConfig& cfg) {
  if (const auto* km = std::get_if<KMeansParams>(&cfg.algorithm)) {
    return {{"k", km->k}, {"seed", km->seed}, {"restarts", km->restarts}, {"max_iter", km->max_iter},
            {"tol", km->tol}};
  }
  const auto& db = std::get<DbscanParams>(cfg.algorithm);
  return {{"eps", db.eps}, {"min_members", db.min_members}};
}

json composition_json(const std::vector<CompositionRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json counts = json::object();
    for (std::size_t c = 0; c < kNormativeCategoryCount; ++c) {
      counts[std::string(to_string(kNormativeCategories[c]))] = r.counts[c];
    }
    json row;
    if (r.is_noise()) {
      row["cluster"] = "noise";
    } else {
      row["cluster"] = r.cluster_id;
    }
    row["size"] = r.size;
    row["counts"] = std::move(counts);
    row["majority"] = std::string(to_string(r.majority));
    row["homogeneity"] = r.homogeneity;
    row["weighed_homogeneity"] = r.weighed_homogeneity;
    arr.push_back(std::move(row));
  }
  return arr;
}

std::vector<CompositionRow> composition_from_json(const json& arr) {
  std::vector<CompositionRow> rows;
  for (const auto& j : arr) {
    CompositionRow r;
    const auto& cl = j.at("cluster");
    r.cluster_id = cl.is_string() ? kNoise : cl.get<ClusterId>();
    r.size = j.at("size").get<std::size_t>();
    for (std::size_t c = 0; c < kNormativeCategoryCount; ++c) {
      r.counts[c] = j.at("counts").value(std::string(to_string(kNormativeCategories[c])), std::size_t{0});
    }
    const auto maj = parse_category(j.at("majority").get<std::string>());
    if (!maj) throw InputError("unknown majority category");
    r.majority = *maj;
    r.homogeneity = j.at("homogeneity").get<double>();
    r.weighed_homogeneity = j.at("weighed_homogeneity").get<double>();
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

void write_results_jsonl(std::ostream& out, const std::vector<RunResult>& results, bool include_timing) {
  for (const auto& r : results) {
    json j;
    j["index"] = r.config.index;
    j["algorithm"] = std::string(r.config.algorithm_name());
    j["params"] = params_json(r.config);
    j["model_id"] = r.config.model_id;
    j["family"] = std::string(to_string(r.config.family));
    j["mode"] = std::string(to_string(r.config.mode));
    if (r.ok()) {
      j["status"] = "ok";
      j["awh"] = r.score->value;
      j["n_clusters"] = r.score->n_clusters;
      j["n_samples"] = r.score->n_samples;
      j["noise"] = r.noise;
      j["composition"] = composition_json(r.composition);
    } else {
      j["status"] = "failed";
      j["awh"] = 0.0;
      j["error"] = r.failure.value_or("unknown failure");
    }
    if (include_timing) j["wall_time_s"] = r.wall_time.count();
    out << j.dump() << '\n';
  }
}

std::vector<RunResult> read_results_jsonl(std::istream& in) {
  std::vector<RunResult> results;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = chomp(line);
    if (body.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      const json j = json::parse(body);
      RunResult r;
      r.config.index = j.at("index").get<std::size_t>();
      r.config.model_id = j.at("model_id").get<std::string>();
      const auto family = parse_model_family(j.at("family").get<std::string>());
      const auto mode = parse_extraction_mode(j.at("mode").get<std::string>());
      if (!family || !mode) throw ParseError(line_no, "unknown family or mode");
      r.config.family = *family;
      r.config.mode = *mode;
      const auto& p = j.at("params");
      const auto algo = j.at("algorithm").get<std::string>();
      if (algo == "kmeans") {
        KMeansParams km;
        km.k = p.at("k").get<std::size_t>();
        km.seed = p.value("seed", std::uint64_t{0});
        km.restarts = p.value("restarts", km.restarts);
        km.max_iter = p.value("max_iter", km.max_iter);
        km.tol = p.value("tol", km.tol);
        r.config.algorithm = km;
      } else if (algo == "dbscan") {
        r.config.algorithm = DbscanParams{p.at("eps").get<double>(), p.at("min_members").get<std::size_t>()};
      } else {
        throw ParseError(line_no, "unknown algorithm \"" + algo + "\"");
      }
      if (j.at("status").get<std::string>() == "ok") {
        r.score = AwhScore{j.at("awh").get<double>(), j.at("n_clusters").get<std::size_t>(),
                           j.at("n_samples").get<std::size_t>()};
        r.noise = j.value("noise", std::size_t{0});
        if (const auto it = j.find("composition"); it != j.end()) r.composition = composition_from_json(*it);
      } else {
        r.failure = j.value("error", std::string("failed"));
      }
      if (const auto it = j.find("wall_time_s"); it != j.end()) {
        r.wall_time = std::chrono::duration<double>(it->get<double>());
      }
      results.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("malformed result: ") + e.what());
    }
  }
  return results;
}

void write_chart_tsv(std::ostream& out, const std::vector<RunResult>& ranked) {
  out << "rank\tmodel_id\tmode\talgorithm\tparams\tscore\n";
  std::size_t rank = 0;
  for (const auto& r : ranked) {
    out << ++rank << '\t' << tsv_escape(r.config.model_id) << '\t' << to_string(r.config.mode) << '\t'
        << r.config.algorithm_name() << '\t' << r.config.params_string() << '\t'
        << format_double(r.score ? r.score->value : 0.0) << '\n';
  }
}

}  // namespace normcluster
