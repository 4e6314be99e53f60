#include "normcluster/bootstrap.hpp"

#include <algorithm>
#include <iterator>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "normcluster/error.hpp"
#include "normcluster/text_io.hpp"

namespace normcluster {

using nlohmann::json;

namespace {

constexpr std::string_view kAbbreviations[] = {
    "al",  "approx", "art", "ca",  "cf",  "ch", "co",  "corp", "dr",   "e.g", "ed",  "eds",
    "esp", "fig",    "i.e", "inc", "jr",  "ltd", "mr", "mrs",  "ms",   "no",  "nr",  "p",
    "para", "pp",    "prof", "sec", "sr", "st",  "u.k", "u.s", "vs"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_terminal(char c) { return c == '.' || c == '!' || c == '?' || c == ';'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// True when the '.' at `dot` closes an abbreviation or an initial.
bool abbreviation_before(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(text[b - 1])) --b;
  std::string_view word = text.substr(b, dot - b);
  while (!word.empty() && (word.front() == '(' || word.front() == '[' || word.front() == '"' || word.front() == '\'')) {
    word.remove_prefix(1);
  }
  if (word.empty()) return false;
  if (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word.front()))) return true;
  const std::string w = lower(word);
  return std::find(std::begin(kAbbreviations), std::end(kAbbreviations), w) != std::end(kAbbreviations);
}

void emit(SegmentedDocument& doc, std::string_view text, std::size_t begin, std::size_t end) {
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  if (begin == end) return;
  Sentence s;
  s.id = doc.doc_id + ":" + std::to_string(doc.sentences.size() + 1);
  s.text = std::string(text.substr(begin, end - begin));
  s.begin = begin;
  s.end = end;
  doc.sentences.push_back(std::move(s));
}

std::size_t parse_size(const std::string& field, std::size_t line_no) {
  std::size_t v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw ParseError(line_no, "expected an integer, got \"" + field + "\"");
  }
  return v;
}

}  // namespace

SegmentedDocument segment(std::string_view text, std::string doc_id) {
  SegmentedDocument doc;
  doc.doc_id = std::move(doc_id);
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n' || c == '\r') {
      emit(doc, text, start, i);
      start = ++i;
      continue;
    }
    if (!is_terminal(c)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_terminal(text[j])) ++j;
    const bool single_dot = c == '.' && j == i + 1;
    while (j < text.size() && is_closer(text[j])) ++j;
    const bool at_boundary = j == text.size() || is_space(text[j]);
    if (at_boundary && !(single_dot && abbreviation_before(text, i))) {
      emit(doc, text, start, j);
      start = j;
    }
    i = j;
  }
  emit(doc, text, start, text.size());
  return doc;
}

void write_sentences_tsv(std::ostream& out, const SegmentedDocument& doc) {
  out << "sentence_id\tdoc_id\tbegin\tend\ttext\n";
  for (const auto& s : doc.sentences) {
    out << tsv_escape(s.id) << '\t' << tsv_escape(doc.doc_id) << '\t' << s.begin << '\t' << s.end << '\t'
        << tsv_escape(s.text) << '\n';
  }
}

SegmentedDocument read_sentences_tsv(std::istream& in) {
  SegmentedDocument doc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = chomp(line);
    if (line_no == 1 && body.starts_with("sentence_id\t")) continue;
    if (body.empty()) continue;
    const auto f = split_tsv(body);
    if (f.size() != 5) throw ParseError(line_no, "expected 5 tab-separated columns");
    const std::string doc_id = tsv_unescape(f[1]);
    if (doc.sentences.empty()) {
      doc.doc_id = doc_id;
    } else if (doc.doc_id != doc_id) {
      throw ParseError(line_no, "sentences from more than one document");
    }
    doc.sentences.push_back({tsv_unescape(f[0]), tsv_unescape(f[4]), parse_size(f[2], line_no), parse_size(f[3], line_no)});
  }
  return doc;
}

Verdict Verdict::accepted(Category c) {
  if (!is_normative(c)) throw InputError("an accepted verdict needs a normative category");
  return {VerdictKind::Accepted, c};
}

Verdict parse_verdict(std::string_view field) {
  while (!field.empty() && is_space(field.front())) field.remove_prefix(1);
  while (!field.empty() && is_space(field.back())) field.remove_suffix(1);
  if (field.empty()) return Verdict::pending();
  const std::string f = lower(field);
  if (f == "reject") return Verdict::rejected();
  if (f.starts_with("accept:")) {
    const auto cat = parse_category_icase(field.substr(7));
    if (!cat || !is_normative(*cat)) {
      throw InputError("verdict \"" + std::string(field) + "\" names no normative category");
    }
    return Verdict::accepted(*cat);
  }
  throw InputError("unrecognised verdict \"" + std::string(field) + "\" (use accept:<Category> or reject)");
}

std::string format_verdict(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::Pending: return "";
    case VerdictKind::Rejected: return "reject";
    case VerdictKind::Accepted: return "accept:" + std::string(to_string(v.category));
  }
  return "";
}

bool RejectionLedger::contains(std::string_view doc_id, std::string_view sentence_id) const {
  return keys_.contains(std::pair<std::string, std::string>(doc_id, sentence_id));
}

bool RejectionLedger::add(std::string doc_id, std::string sentence_id) {
  return keys_.emplace(std::move(doc_id), std::move(sentence_id)).second;
}

RejectionLedger RejectionLedger::load(std::istream& in) {
  RejectionLedger ledger;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = chomp(line);
    if (body.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      const json j = json::parse(body);
      ledger.add(j.at("doc_id").get<std::string>(), j.at("sentence_id").get<std::string>());
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("malformed ledger entry: ") + e.what());
    }
  }
  return ledger;
}

void RejectionLedger::append(std::ostream& out, const ReviewEntry& rejected) {
  const json j = {{"doc_id", rejected.doc_id},
                  {"sentence_id", rejected.sentence_id},
                  {"text", rejected.text},
                  {"predicted", std::string(to_string(rejected.predicted))}};
  out << j.dump() << '\n';
}

ReviewBatch mine(const ClassifierModel& model, const SegmentedDocument& doc, const EmbeddingMap& embeddings,
                 const RejectionLedger* ledger) {
  std::set<std::string_view> known;
  for (const auto& s : model.training()) known.insert(s.id);

  ReviewBatch batch;
  for (const auto& s : doc.sentences) {
    const auto it = embeddings.find(s.id);
    if (it == embeddings.end()) throw InputError("no embedding for sentence \"" + s.id + "\"");
    if (ledger != nullptr && ledger->contains(doc.doc_id, s.id)) continue;
    if (known.contains(s.id)) continue;
    const Prediction p = predict(model, it->second, s.id);
    if (!is_normative(p.label)) continue;
    batch.entries.push_back({s.id, doc.doc_id, s.text, p.label, p.gate_similarity, Verdict::pending()});
  }
  std::stable_sort(batch.entries.begin(), batch.entries.end(),
                   [](const ReviewEntry& a, const ReviewEntry& b) { return a.gate_similarity > b.gate_similarity; });
  return batch;
}

MergeOutcome merge_reviews(std::vector<LabeledSample> training, const ReviewBatch& batch,
                           const EmbeddingMap& embeddings, RejectionLedger& ledger) {
  for (const auto& e : batch.entries) {
    if (e.verdict.kind == VerdictKind::Pending) {
      throw InputError("review entry \"" + e.sentence_id + "\" has no verdict yet");
    }
  }
  std::set<std::string> ids;
  for (const auto& s : training) ids.insert(s.id);

  MergeOutcome out;
  for (const auto& e : batch.entries) {
    if (e.verdict.kind != VerdictKind::Accepted) continue;
    const auto it = embeddings.find(e.sentence_id);
    if (it == embeddings.end()) throw InputError("no embedding for accepted sentence \"" + e.sentence_id + "\"");
    if (!ids.insert(e.sentence_id).second) {
      throw InputError("accepted sentence \"" + e.sentence_id + "\" is already a training sample");
    }
    training.push_back({e.sentence_id, it->second, e.verdict.category});
    ++out.accepted;
  }
  for (const auto& e : batch.entries) {
    if (e.verdict.kind == VerdictKind::Rejected) {
      ledger.add(e.doc_id, e.sentence_id);
      ++out.rejected;
    }
  }
  out.training = std::move(training);
  return out;
}

void write_review_tsv(std::ostream& out, const ReviewBatch& batch) {
  out << "sentence_id\tdoc_id\ttext\tpredicted_category\tgate_similarity\tverdict\n";
  for (const auto& e : batch.entries) {
    out << tsv_escape(e.sentence_id) << '\t' << tsv_escape(e.doc_id) << '\t' << tsv_escape(e.text) << '\t'
        << to_string(e.predicted) << '\t' << format_double(e.gate_similarity) << '\t' << format_verdict(e.verdict)
        << '\n';
  }
}

ReviewBatch read_review_tsv(std::istream& in) {
  ReviewBatch batch;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = chomp(line);
    if (line_no == 1 && body.starts_with("sentence_id\t")) continue;
    if (body.empty()) continue;
    auto f = split_tsv(body);
    if (f.size() == 5) f.emplace_back();  // editors may drop the trailing empty verdict column
    if (f.size() != 6) throw ParseError(line_no, "expected 6 tab-separated columns");
    ReviewEntry e;
    e.sentence_id = tsv_unescape(f[0]);
    e.doc_id = tsv_unescape(f[1]);
    e.text = tsv_unescape(f[2]);
    const auto cat = parse_category(f[3]);
    if (!cat) throw ParseError(line_no, "unknown predicted category \"" + f[3] + "\"");
    e.predicted = *cat;
    try {
      e.gate_similarity = std::stod(f[4]);
      e.verdict = parse_verdict(f[5]);
    } catch (const InputError& err) {
      throw ParseError(line_no, err.what());
    } catch (const std::exception&) {
      throw ParseError(line_no, "bad gate_similarity \"" + f[4] + "\"");
    }
    batch.entries.push_back(std::move(e));
  }
  return batch;
}

}  // namespace normcluster
