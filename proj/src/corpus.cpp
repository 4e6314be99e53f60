#include "normcluster/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "normcluster/error.hpp"
#include "normcluster/simd/kernels.hpp"
#include "normcluster/text_io.hpp"

namespace normcluster {

using nlohmann::json;

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

class RecordParser {
public:
  EmbeddingRecord parse(std::string_view line, std::size_t line_no) {
    line_ = line_no;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) fail("expected a JSON object");

    EmbeddingRecord rec;
    rec.id = required_string(j, "id");
    rec.text = required_string(j, "text");
    rec.model_id = required_string(j, "model_id");
    if (auto it = j.find("source_doc"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) fail("\"source_doc\" must be a string");
      rec.source_doc = it->get<std::string>();
    }
    if (auto it = j.find("label"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) fail("\"label\" must be a string");
      const auto name = it->get<std::string>();
      const auto cat = parse_category(name);
      if (!cat) fail("unknown label \"" + name + "\"");
      if (!is_normative(*cat)) fail("gold label may not be NonNormative");
      rec.label = cat;
    }
    if (auto it = j.find("tokens"); it != j.end() && !it->is_null()) {
      if (!it->is_array()) fail("\"tokens\" must be an array");
      std::vector<Token> tokens;
      tokens.reserve(it->size());
      for (const auto& t : *it) {
        if (!t.is_object()) fail("token entries must be objects {\"t\", \"v\"}");
        Token tok;
        const auto surface = t.find("t");
        if (surface == t.end() || !surface->is_string()) fail("token missing string \"t\"");
        tok.surface = surface->get<std::string>();
        const auto v = t.find("v");
        if (v == t.end()) fail("token missing \"v\"");
        tok.vector = vector_of(*v, "token vector");
        tokens.push_back(std::move(tok));
      }
      rec.tokens = std::move(tokens);
    }
    if (auto it = j.find("sentence_vector"); it != j.end() && !it->is_null()) {
      rec.sentence_vector = vector_of(*it, "sentence_vector");
    }
    const bool has_tokens = rec.tokens && !rec.tokens->empty();
    if (!has_tokens && !rec.sentence_vector) {
      fail("record \"" + rec.id + "\" has neither tokens nor sentence_vector");
    }
    if (!ids_.insert(rec.id).second) fail("duplicate id \"" + rec.id + "\"");
    return rec;
  }

  std::optional<std::size_t> dim() const { return dim_; }

private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  std::string required_string(const json& j, const char* key) const {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) fail(std::string("missing string field \"") + key + "\"");
    return it->get<std::string>();
  }

  Vector vector_of(const json& j, const char* what) {
    if (!j.is_array()) fail(std::string(what) + " must be an array of numbers");
    Vector v;
    v.reserve(j.size());
    for (const auto& x : j) {
      if (!x.is_number()) fail(std::string(what) + " must be an array of numbers");
      v.push_back(x.get<double>());
    }
    if (v.empty()) fail(std::string(what) + " is empty");
    if (!dim_) {
      dim_ = v.size();
    } else if (*dim_ != v.size()) {
      fail("dimension mismatch: " + std::string(what) + " has " + std::to_string(v.size()) +
           " components, corpus dimension is " + std::to_string(*dim_));
    }
    return v;
  }

  std::size_t line_ = 0;
  std::optional<std::size_t> dim_;
  std::unordered_set<std::string> ids_;
};

}  // namespace

bool Corpus::has_tokens() const noexcept {
  return !records.empty() && std::all_of(records.begin(), records.end(), [](const auto& r) {
    return r.tokens && !r.tokens->empty();
  });
}

bool Corpus::fully_labeled() const noexcept {
  return std::all_of(records.begin(), records.end(), [](const auto& r) { return r.label.has_value(); });
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].id == id) return i;
  }
  return std::nullopt;
}

Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  RecordParser parser;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = chomp(line);
    if (is_blank(body)) continue;
    corpus.records.push_back(parser.parse(body, line_no));
  }
  corpus.dim = parser.dim();
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open corpus file " + path);
  try {
    return parse_corpus(in);
  } catch (const ParseError& e) {
    throw ParseError(path, e.line(), e.detail());
  }
}

void write_record(std::ostream& out, const EmbeddingRecord& rec) {
  json j;
  j["id"] = rec.id;
  j["text"] = rec.text;
  j["model_id"] = rec.model_id;
  if (rec.tokens) {
    json toks = json::array();
    for (const auto& t : *rec.tokens) toks.push_back({{"t", t.surface}, {"v", t.vector}});
    j["tokens"] = std::move(toks);
  }
  if (rec.sentence_vector) j["sentence_vector"] = *rec.sentence_vector;
  if (rec.label) j["label"] = std::string(to_string(*rec.label));
  if (rec.source_doc) j["source_doc"] = *rec.source_doc;
  out << j.dump() << '\n';
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& r : corpus.records) write_record(out, r);
}

std::string_view to_string(ExtractionMode m) noexcept {
  switch (m) {
    case ExtractionMode::FocusWord: return "FocusWord";
    case ExtractionMode::TokenMean: return "TokenMean";
    case ExtractionMode::SentenceDirect: return "SentenceDirect";
  }
  return "?";
}

std::optional<ExtractionMode> parse_extraction_mode(std::string_view name) noexcept {
  for (auto m : {ExtractionMode::FocusWord, ExtractionMode::TokenMean, ExtractionMode::SentenceDirect}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

FocusWordList::FocusWordList(std::vector<std::string> patterns) {
  patterns_.reserve(patterns.size());
  for (auto& p : patterns) {
    if (p.empty() || p == "*") throw InputError("empty focus-word pattern");
    patterns_.push_back(lowercase(p));
  }
}

FocusWordList FocusWordList::tax_law_default() {
  return FocusWordList({"taxation", "tax*", "VAT", "revenue-raising", "redistribution", "income",
                        "reward", "pay"});
}

FocusWordList FocusWordList::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open focus-word list " + path);
  std::vector<std::string> patterns;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view body = chomp(line);
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) body.remove_prefix(1);
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.remove_suffix(1);
    if (body.empty() || body.front() == '#') continue;
    patterns.emplace_back(body);
  }
  return FocusWordList(std::move(patterns));
}

bool FocusWordList::matches(std::size_t pattern_index, std::string_view surface) const {
  const std::string& p = patterns_.at(pattern_index);
  const std::string token = lowercase(surface);
  if (p.back() == '*') {
    const std::string_view prefix(p.data(), p.size() - 1);
    return std::string_view(token).starts_with(prefix);
  }
  return token == p;
}

std::optional<FocusMatch> select_focus_token(const EmbeddingRecord& record,
                                             const FocusWordList& words) {
  if (!record.tokens) throw InputError("record \"" + record.id + "\" has no tokens");
  const auto& tokens = *record.tokens;
  for (std::size_t p = 0; p < words.patterns().size(); ++p) {
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (words.matches(p, tokens[t].surface)) return FocusMatch{t, words.patterns()[p]};
    }
  }
  return std::nullopt;
}

Vector token_mean(const EmbeddingRecord& record) {
  if (!record.tokens || record.tokens->empty()) {
    throw InputError("record \"" + record.id + "\" has no tokens to average");
  }
  const auto& tokens = *record.tokens;
  Vector mean(tokens.front().vector.size(), 0.0);
  for (const auto& t : tokens) simd::accumulate(mean, t.vector);
  const double n = static_cast<double>(tokens.size());
  for (double& x : mean) x /= n;
  return mean;
}

ResolvedEmbedding resolve_embedding(const EmbeddingRecord& record, ExtractionMode mode,
                                    const FocusWordList& words) {
  switch (mode) {
    case ExtractionMode::SentenceDirect:
      if (!record.sentence_vector) {
        throw InputError("record \"" + record.id + "\" has no sentence_vector (mode SentenceDirect)");
      }
      return {*record.sentence_vector, false, std::nullopt};
    case ExtractionMode::TokenMean:
      return {token_mean(record), false, std::nullopt};
    case ExtractionMode::FocusWord: {
      if (!record.tokens || record.tokens->empty()) {
        throw InputError("record \"" + record.id + "\" has no tokens (mode FocusWord)");
      }
      if (auto match = select_focus_token(record, words)) {
        return {(*record.tokens)[match->token_index].vector, false, std::move(match->pattern)};
      }
      return {token_mean(record), true, std::nullopt};
    }
  }
  throw InputError("unknown extraction mode");
}

ResolvedCorpus resolve_corpus(const Corpus& corpus, ExtractionMode mode,
                              const FocusWordList& words) {
  ResolvedCorpus out;
  out.points = Points(corpus.dim.value_or(0));
  out.ids.reserve(corpus.size());
  for (const auto& rec : corpus.records) {
    auto r = resolve_embedding(rec, mode, words);
    out.points.push_back(r.vector);
    out.ids.push_back(rec.id);
    if (r.fell_back) out.fallback_ids.push_back(rec.id);
  }
  return out;
}

}  // namespace normcluster
