#include "multigras/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "multigras/rouge.hpp"

namespace multigras {

using nlohmann::json;

std::vector<std::string> Sentence::surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

std::vector<std::string> Document::reference_tokens() const {
  std::vector<std::string> out;
  for (const auto& line : reference_summary) out.insert(out.end(), line.begin(), line.end());
  return out;
}

// ---------------------------------------------------------------------------
// Tokenization

namespace {

bool is_punct_char(unsigned char c) { return std::ispunct(c) != 0; }

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view raw_text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char ch : raw_text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (is_punct_char(c)) {
      flush();
      tokens.emplace_back(1, static_cast<char>(c));
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return tokens;
}

bool is_punctuation(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), [](char c) {
    return is_punct_char(static_cast<unsigned char>(c));
  });
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() {
  words_.emplace_back(kUnkToken);
  ids_.emplace(std::string(kUnkToken), kUnkId);
}

std::size_t Vocabulary::id(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::word(std::size_t id) const {
  if (id >= words_.size()) throw std::out_of_range("Vocabulary::word: id out of range");
  return words_[id];
}

bool Vocabulary::contains(std::string_view word) const {
  return ids_.count(std::string(word)) != 0;
}

std::size_t Vocabulary::add(const std::string& word) {
  if (auto it = ids_.find(word); it != ids_.end()) return it->second;
  if (words_.size() >= max_size_) throw ConfigError("Vocabulary::add: vocabulary is full");
  ids_.emplace(word, words_.size());
  words_.push_back(word);
  return words_.size() - 1;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vocabulary: " + path.string());
  // Line i holds the word with id i; line 0 is the UNK marker.
  for (const auto& w : words_) out << w << '\n';
}

Vocabulary Vocabulary::load(const std::filesystem::path& path, std::size_t max_size) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read vocabulary: " + path.string());
  Vocabulary vocab;
  vocab.max_size_ = max_size;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != kUnkToken) {
        throw ParseError(path.string() + ":1: vocabulary must start with " +
                         std::string(kUnkToken));
      }
      continue;
    }
    if (line.empty()) throw ParseError(path.string() + ":" + std::to_string(line_no) + ": empty word");
    if (vocab.contains(line)) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": duplicate word '" + line + "'");
    }
    vocab.add(line);
  }
  return vocab;
}

Vocabulary build_vocabulary(const Corpus& corpus, std::size_t max_size) {
  if (max_size < 2) throw ConfigError("build_vocabulary: max_size must be >= 2");
  std::map<std::string, std::size_t> freq;
  for (const auto& doc : corpus.documents)
    for (const auto& s : doc.sentences)
      for (const auto& t : s.tokens) ++freq[t.surface];

  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  // Map order is lexicographic, so a stable sort on count keeps lexicographic tie order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary vocab;
  vocab.max_size_ = max_size;
  for (const auto& [word, count] : ranked) {
    if (vocab.size() >= max_size) break;
    if (word == Vocabulary::kUnkToken) continue;
    vocab.add(word);
  }
  return vocab;
}

void assign_vocab_ids(Corpus& corpus, const Vocabulary& vocab) {
  for (auto& doc : corpus.documents)
    for (auto& s : doc.sentences)
      for (auto& t : s.tokens) t.vocab_id = vocab.id(t.surface);
}

// ---------------------------------------------------------------------------
// Embeddings

namespace {

bool parse_double(std::string_view text, double& value) {
  // std::from_chars for double is available in libstdc++ >= 11.
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

}  // namespace

EmbeddingTable load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                               Eigen::Index dim) {
  if (dim < 1) throw ConfigError("load_embeddings: dimension must be >= 1");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read embeddings: " + path.string());
  EmbeddingTable emb{Matrix::Zero(static_cast<Eigen::Index>(vocab.size()), dim)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    auto where = [&] { return path.string() + ":" + std::to_string(line_no) + ": "; };
    if (static_cast<Eigen::Index>(fields.size()) != dim + 1) {
      throw ParseError(where() + "expected word and " + std::to_string(dim) + " values, got " +
                       std::to_string(fields.size() - 1));
    }
    std::vector<double> values(static_cast<std::size_t>(dim));
    for (Eigen::Index k = 0; k < dim; ++k) {
      if (!parse_double(fields[static_cast<std::size_t>(k) + 1], values[static_cast<std::size_t>(k)]) ||
          !std::isfinite(values[static_cast<std::size_t>(k)])) {
        throw ParseError(where() + "bad value '" + std::string(fields[static_cast<std::size_t>(k) + 1]) + "'");
      }
    }
    const std::string word(fields[0]);
    if (!vocab.contains(word) || word == Vocabulary::kUnkToken) continue;
    const auto row = static_cast<Eigen::Index>(vocab.id(word));
    for (Eigen::Index k = 0; k < dim; ++k) emb.table(row, k) = values[static_cast<std::size_t>(k)];
  }
  return emb;
}

void save_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                     const EmbeddingTable& emb) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write embeddings: " + path.string());
  char buf[64];
  for (std::size_t id = 1; id < vocab.size(); ++id) {
    out << vocab.word(id);
    for (Eigen::Index k = 0; k < emb.dim(); ++k) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), emb.table(static_cast<Eigen::Index>(id), k));
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Corpus I/O

std::vector<DepEdge> linear_chain_edges(std::size_t n_tokens) {
  std::vector<DepEdge> edges;
  for (std::size_t i = 0; i + 1 < n_tokens; ++i) edges.emplace_back(i, i + 1);
  return edges;
}

void validate(const Document& doc) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("document '" + doc.id + "': " + what);
  };
  if (doc.sentences.empty()) fail("sentences: must contain at least one sentence");
  for (std::size_t m = 0; m < doc.sentences.size(); ++m) {
    const auto& s = doc.sentences[m];
    const std::string where = "sentences[" + std::to_string(m) + "]";
    if (s.tokens.empty()) fail(where + ".tokens: empty sentence");
    for (const auto& t : s.tokens)
      if (t.surface.empty()) fail(where + ".tokens: empty token");
    for (const auto& [h, d] : s.dep_edges) {
      if (h >= s.tokens.size() || d >= s.tokens.size()) {
        fail(where + ".dep_edges: index out of range (" + std::to_string(h) + "," +
             std::to_string(d) + ") for " + std::to_string(s.tokens.size()) + " tokens");
      }
      if (h == d) fail(where + ".dep_edges: self-edge at " + std::to_string(h));
    }
  }
  if (doc.oracle_labels) {
    const auto& labels = *doc.oracle_labels;
    if (labels.size() != doc.sentences.size()) fail("labels: length differs from sentence count");
    if (std::none_of(labels.begin(), labels.end(), [](int y) { return y == 1; }))
      fail("labels: no sentence selected");
    if (std::any_of(labels.begin(), labels.end(), [](int y) { return y != 0 && y != 1; }))
      fail("labels: values must be 0 or 1");
  }
}

namespace {

std::vector<std::string> token_list(const json& j, const std::string& doc_id, const std::string& field) {
  // Accepts either a list of tokens or a raw string to be tokenized.
  if (j.is_string()) return tokenize(j.get<std::string>());
  if (!j.is_array()) throw ValidationError("document '" + doc_id + "': " + field + ": expected list of strings");
  std::vector<std::string> out;
  for (const auto& t : j) {
    if (!t.is_string()) throw ValidationError("document '" + doc_id + "': " + field + ": token is not a string");
    out.push_back(lowercase(t.get<std::string>()));
  }
  return out;
}

}  // namespace

Document parse_document(std::string_view json_line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw ParseError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ParseError("line " + std::to_string(line_no) + ": expected an object");

  Document doc;
  if (!j.contains("id") || !j["id"].is_string())
    throw ValidationError("line " + std::to_string(line_no) + ": field 'id' missing or not a string");
  doc.id = j["id"].get<std::string>();
  auto fail = [&](const std::string& what) {
    throw ValidationError("document '" + doc.id + "': " + what);
  };

  if (!j.contains("sentences") || !j["sentences"].is_array()) fail("sentences: missing or not a list");
  std::size_t m = 0;
  for (const auto& js : j["sentences"]) {
    const std::string where = "sentences[" + std::to_string(m++) + "]";
    if (!js.is_object() && !js.is_string()) fail(where + ": expected an object or a string");
    Sentence s;
    std::vector<std::string> surfaces;
    if (js.is_string()) {
      surfaces = tokenize(js.get<std::string>());
    } else if (js.contains("tokens")) {
      surfaces = token_list(js["tokens"], doc.id, where + ".tokens");
    } else if (js.contains("text")) {
      surfaces = token_list(js["text"], doc.id, where + ".text");
    } else {
      fail(where + ": needs 'tokens' or 'text'");
    }
    for (auto& w : surfaces) s.tokens.push_back(Token{std::move(w), 0});
    if (js.is_object() && js.contains("dep_edges") && !js["dep_edges"].is_null()) {
      if (!js["dep_edges"].is_array()) fail(where + ".dep_edges: expected list of pairs");
      for (const auto& e : js["dep_edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
          fail(where + ".dep_edges: expected [int,int]");
        const auto h = e[0].get<long long>();
        const auto d = e[1].get<long long>();
        if (h < 0 || d < 0) fail(where + ".dep_edges: negative index");
        s.dep_edges.emplace_back(static_cast<std::size_t>(h), static_cast<std::size_t>(d));
      }
    } else {
      s.dep_edges = linear_chain_edges(s.tokens.size());
    }
    doc.sentences.push_back(std::move(s));
  }

  if (j.contains("summary")) {
    if (!j["summary"].is_array()) fail("summary: expected a list");
    std::size_t k = 0;
    for (const auto& line : j["summary"])
      doc.reference_summary.push_back(token_list(line, doc.id, "summary[" + std::to_string(k++) + "]"));
  }
  if (j.contains("labels") && !j["labels"].is_null()) {
    if (!j["labels"].is_array()) fail("labels: expected a list");
    std::vector<int> labels;
    for (const auto& y : j["labels"]) {
      if (!y.is_number_integer()) fail("labels: expected integers");
      labels.push_back(y.get<int>());
    }
    doc.oracle_labels = std::move(labels);
  }
  validate(doc);
  return doc;
}

std::string serialize_document(const Document& doc) {
  json j;
  j["id"] = doc.id;
  j["sentences"] = json::array();
  for (const auto& s : doc.sentences) {
    json edges = json::array();
    for (const auto& [h, d] : s.dep_edges) edges.push_back({h, d});
    j["sentences"].push_back({{"tokens", s.surfaces()}, {"dep_edges", edges}});
  }
  j["summary"] = doc.reference_summary;
  if (doc.oracle_labels) j["labels"] = *doc.oracle_labels;
  return j.dump();
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read corpus: " + path.string());
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    corpus.documents.push_back(parse_document(line, line_no));
  }
  return corpus;
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus: " + path.string());
  for (const auto& doc : corpus.documents) out << serialize_document(doc) << '\n';
}

// ---------------------------------------------------------------------------
// Oracle labels

std::vector<std::string> concat_sentences(const Document& doc,
                                          const std::vector<std::size_t>& selected) {
  std::vector<std::size_t> order(selected);
  std::sort(order.begin(), order.end());
  std::vector<std::string> out;
  for (auto m : order)
    for (const auto& t : doc.sentences.at(m).tokens) out.push_back(t.surface);
  return out;
}

double oracle_objective(const Document& doc, const std::vector<std::size_t>& selected) {
  const auto candidate = concat_sentences(doc, selected);
  const auto reference = doc.reference_tokens();
  return 0.5 * (rouge::rouge_n(candidate, reference, 1).f1 +
                rouge::rouge_n(candidate, reference, 2).f1);
}

std::vector<OracleStep> greedy_oracle_trace(const Document& doc, const OracleOptions& options) {
  if (doc.reference_tokens().empty())
    throw ValidationError("oracle: document '" + doc.id + "' has an empty reference summary");
  std::vector<OracleStep> steps;
  std::vector<std::size_t> selected;
  std::vector<bool> taken(doc.size(), false);
  double current = 0.0;
  while (selected.size() < options.max_oracle && selected.size() < doc.size()) {
    std::size_t best = doc.size();
    double best_score = -1.0;
    for (std::size_t m = 0; m < doc.size(); ++m) {
      if (taken[m]) continue;
      auto trial = selected;
      trial.push_back(m);
      const double score = oracle_objective(doc, trial);
      if (score > best_score) {
        best_score = score;
        best = m;
      }
    }
    // The first pick is unconditional so the label vector is never empty.
    if (!selected.empty() && best_score <= current) break;
    selected.push_back(best);
    taken[best] = true;
    current = best_score;
    steps.push_back({best, best_score});
  }
  return steps;
}

std::vector<int> extract_oracle_labels(const Document& doc, std::size_t max_oracle) {
  std::vector<int> labels(doc.size(), 0);
  if (max_oracle == 0) max_oracle = 1;
  for (const auto& step : greedy_oracle_trace(doc, {max_oracle})) labels[step.sentence] = 1;
  return labels;
}

}  // namespace multigras
