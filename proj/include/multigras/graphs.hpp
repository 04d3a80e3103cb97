#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "multigras/corpus.hpp"

namespace multigras::graphs {

/// Dense symmetric, nonnegative, finite matrix over a node set.
using AdjacencyMatrix = Matrix;

/// One adjacency matrix per relation, all over the same node set.
class MultiplexGraph {
 public:
  void add(const std::string& relation, AdjacencyMatrix adjacency);

  std::size_t node_count() const { return nodes_; }
  std::size_t relation_count() const { return relations_.size(); }
  bool contains(const std::string& relation) const { return relations_.count(relation) != 0; }
  const AdjacencyMatrix& at(const std::string& relation) const { return relations_.at(relation); }
  const std::map<std::string, AdjacencyMatrix>& relations() const { return relations_; }

 private:
  std::size_t nodes_ = 0;
  std::map<std::string, AdjacencyMatrix> relations_;
};

/// True when `a` is square, symmetric, nonnegative and finite.
bool is_valid_adjacency(const AdjacencyMatrix& a);

AdjacencyMatrix build_syntactic_graph(std::size_t n_tokens, const std::vector<DepEdge>& dep_edges);

/// A[i,j] = |x_i . x_j|; entries below `threshold` are zeroed.
AdjacencyMatrix build_semantic_graph(const Matrix& x, double threshold = 0.0);

/// Kipf normalization with self-loops: D^-1/2 (A + I) D^-1/2.
AdjacencyMatrix normalize_adjacency(const AdjacencyMatrix& a);

// Fixed English stopword list shipped with the library (data/stopwords_en.txt mirrors it).
const std::set<std::string>& default_stopwords();
std::set<std::string> load_stopwords(const std::filesystem::path& path);

class TfidfModel {
 public:
  TfidfModel() = default;

  std::size_t document_count() const { return n_docs_; }
  std::size_t min_df() const { return min_df_; }
  const std::map<std::string, std::size_t>& keywords() const { return df_; }
  bool is_keyword(const std::string& word) const { return df_.count(word) != 0; }
  std::size_t df(const std::string& word) const;
  /// ln(N_docs / df(w)); 0 for non-keywords.
  double idf(const std::string& word) const;

  void save(const std::filesystem::path& path) const;
  static TfidfModel load(const std::filesystem::path& path);

 private:
  friend TfidfModel fit_tfidf(const Corpus&, std::size_t, const std::set<std::string>&);
  std::size_t n_docs_ = 0;
  std::size_t min_df_ = 100;
  std::map<std::string, std::size_t> df_;
};

TfidfModel fit_tfidf(const Corpus& corpus, std::size_t min_df = 100,
                     const std::set<std::string>& stopwords = default_stopwords());

using SparseTfidf = std::map<std::string, double>;

SparseTfidf sentence_tfidf(const Sentence& sentence, const TfidfModel& model);

/// Sentence x keyword tf-idf matrix G over the keywords present in `doc`.
Matrix tfidf_matrix(const Document& doc, const TfidfModel& model);

/// A[m,m'] = sum_w tfidf(s_m,w) tfidf(s_m',w), diagonal zeroed. With `weighted` off the
/// entry is 1 when the two sentences share any keyword.
AdjacencyMatrix build_natural_connection_graph(const Document& doc, const TfidfModel& model,
                                               bool weighted = true);

}  // namespace multigras::graphs
