#include "multigras/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace multigras::graphs {

void MultiplexGraph::add(const std::string& relation, AdjacencyMatrix adjacency) {
  if (adjacency.rows() != adjacency.cols())
    throw std::invalid_argument("MultiplexGraph::add: adjacency for '" + relation + "' is not square");
  const auto n = static_cast<std::size_t>(adjacency.rows());
  if (!relations_.empty() && n != nodes_) {
    throw std::invalid_argument("MultiplexGraph::add: relation '" + relation + "' has " +
                                std::to_string(n) + " nodes, expected " + std::to_string(nodes_));
  }
  nodes_ = n;
  relations_[relation] = std::move(adjacency);
}

bool is_valid_adjacency(const AdjacencyMatrix& a) {
  if (a.rows() != a.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double v = a(i, j);
      if (!std::isfinite(v) || v < 0.0 || v != a(j, i)) return false;
    }
  }
  return true;
}

AdjacencyMatrix build_syntactic_graph(std::size_t n_tokens, const std::vector<DepEdge>& dep_edges) {
  const auto n = static_cast<Eigen::Index>(n_tokens);
  AdjacencyMatrix a = AdjacencyMatrix::Zero(n, n);
  for (const auto& [head, dep] : dep_edges) {
    if (head >= n_tokens || dep >= n_tokens) {
      throw std::out_of_range("build_syntactic_graph: edge (" + std::to_string(head) + "," +
                              std::to_string(dep) + ") out of range for " +
                              std::to_string(n_tokens) + " tokens");
    }
    if (head == dep) continue;
    a(static_cast<Eigen::Index>(head), static_cast<Eigen::Index>(dep)) = 1.0;
    a(static_cast<Eigen::Index>(dep), static_cast<Eigen::Index>(head)) = 1.0;
  }
  return a;
}

AdjacencyMatrix build_semantic_graph(const Matrix& x, double threshold) {
  const Eigen::Index n = x.rows();
  AdjacencyMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double v = std::abs(x.row(i).dot(x.row(j)));
      if (v < threshold) v = 0.0;
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

AdjacencyMatrix normalize_adjacency(const AdjacencyMatrix& a) {
  const Eigen::Index n = a.rows();
  AdjacencyMatrix b = a + AdjacencyMatrix::Identity(n, n);
  Eigen::VectorXd inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) inv_sqrt(i) = 1.0 / std::sqrt(b.row(i).sum());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) *= inv_sqrt(i) * inv_sqrt(j);
  return b;
}

// ---------------------------------------------------------------------------
// Stopwords

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
    "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers",
    "herself", "it", "its", "itself", "they", "them", "their", "theirs", "themselves",
    "what", "which", "who", "whom", "this", "that", "these", "those", "am", "is", "are",
    "was", "were", "be", "been", "being", "have", "has", "had", "having", "do", "does",
    "did", "doing", "a", "an", "the", "and", "but", "if", "or", "because", "as", "until",
    "while", "of", "at", "by", "for", "with", "about", "against", "between", "into",
    "through", "during", "before", "after", "above", "below", "to", "from", "up", "down",
    "in", "out", "on", "off", "over", "under", "again", "further", "then", "once", "here",
    "there", "when", "where", "why", "how", "all", "any", "both", "each", "few", "more",
    "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so",
    "than", "too", "very", "s", "t", "can", "will", "just", "don", "should", "now", "d",
    "ll", "m", "o", "re", "ve", "y", "ain", "aren", "couldn", "didn", "doesn", "hadn",
    "hasn", "haven", "isn", "ma", "mightn", "mustn", "needn", "shan", "shouldn", "wasn",
    "weren", "won", "wouldn", "also", "would", "could", "said", "says", "one", "two",
  };
  return words;
}

std::set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read stopword list: " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

// ---------------------------------------------------------------------------
// tf-idf

std::size_t TfidfModel::df(const std::string& word) const {
  auto it = df_.find(word);
  return it == df_.end() ? 0 : it->second;
}

double TfidfModel::idf(const std::string& word) const {
  const auto d = df(word);
  if (d == 0) return 0.0;
  return std::log(static_cast<double>(n_docs_) / static_cast<double>(d));
}

void TfidfModel::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["format"] = "multigras-tfidf";
  j["version"] = 1;
  j["n_docs"] = n_docs_;
  j["min_df"] = min_df_;
  j["df"] = df_;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write tf-idf model: " + path.string());
  out << j.dump(1) << '\n';
}

TfidfModel TfidfModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read tf-idf model: " + path.string());
  TfidfModel model;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format") != "multigras-tfidf") throw ParseError("not a tf-idf model file");
    model.n_docs_ = j.at("n_docs").get<std::size_t>();
    model.min_df_ = j.at("min_df").get<std::size_t>();
    model.df_ = j.at("df").get<std::map<std::string, std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return model;
}

TfidfModel fit_tfidf(const Corpus& corpus, std::size_t min_df, const std::set<std::string>& stopwords) {
  TfidfModel model;
  model.n_docs_ = corpus.size();
  model.min_df_ = min_df;
  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus.documents) {
    std::set<std::string> seen;
    for (const auto& s : doc.sentences)
      for (const auto& t : s.tokens) seen.insert(t.surface);
    for (const auto& w : seen) ++df[w];
  }
  for (const auto& [word, count] : df) {
    if (count < min_df || stopwords.count(word) != 0 || is_punctuation(word)) continue;
    model.df_.emplace(word, count);
  }
  return model;
}

SparseTfidf sentence_tfidf(const Sentence& sentence, const TfidfModel& model) {
  std::map<std::string, std::size_t> tf;
  for (const auto& t : sentence.tokens)
    if (model.is_keyword(t.surface)) ++tf[t.surface];
  SparseTfidf out;
  for (const auto& [word, count] : tf) out.emplace(word, static_cast<double>(count) * model.idf(word));
  return out;
}

Matrix tfidf_matrix(const Document& doc, const TfidfModel& model) {
  std::vector<SparseTfidf> rows;
  std::map<std::string, Eigen::Index> columns;
  for (const auto& s : doc.sentences) {
    rows.push_back(sentence_tfidf(s, model));
    for (const auto& [w, v] : rows.back()) columns.emplace(w, 0);
  }
  Eigen::Index next = 0;
  for (auto& [w, col] : columns) col = next++;
  Matrix g = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), next);
  for (std::size_t m = 0; m < rows.size(); ++m)
    for (const auto& [w, v] : rows[m]) g(static_cast<Eigen::Index>(m), columns.at(w)) = v;
  return g;
}

AdjacencyMatrix build_natural_connection_graph(const Document& doc, const TfidfModel& model,
                                               bool weighted) {
  const auto n = static_cast<Eigen::Index>(doc.size());
  std::vector<SparseTfidf> rows;
  rows.reserve(doc.size());
  for (const auto& s : doc.sentences) rows.push_back(sentence_tfidf(s, model));

  AdjacencyMatrix a = AdjacencyMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& ri = rows[static_cast<std::size_t>(i)];
      const auto& rj = rows[static_cast<std::size_t>(j)];
      double sum = 0.0;
      bool shared = false;
      for (const auto& [w, v] : ri) {
        auto it = rj.find(w);
        if (it == rj.end()) continue;
        shared = true;
        sum += v * it->second;
      }
      const double value = weighted ? sum : (shared ? 1.0 : 0.0);
      a(i, j) = value;
      a(j, i) = value;
    }
  }
  return a;
}

}  // namespace multigras::graphs
