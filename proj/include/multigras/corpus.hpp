#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace multigras {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Token {
  std::string surface;
  std::size_t vocab_id = 0;
};

// (head, dependent), 0-based token positions.
using DepEdge = std::pair<std::size_t, std::size_t>;

struct Sentence {
  std::vector<Token> tokens;
  std::vector<DepEdge> dep_edges;

  std::vector<std::string> surfaces() const;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::vector<std::vector<std::string>> reference_summary;
  std::optional<std::vector<int>> oracle_labels;

  std::size_t size() const { return sentences.size(); }
  // Reference summary flattened into one token sequence.
  std::vector<std::string> reference_tokens() const;
};

struct Corpus {
  std::vector<Document> documents;

  bool empty() const { return documents.empty(); }
  std::size_t size() const { return documents.size(); }
};

/// Word <-> id map with id 0 reserved for the unknown word.
class Vocabulary {
 public:
  static constexpr std::size_t kUnkId = 0;
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  std::size_t size() const { return words_.size(); }
  std::size_t max_size() const { return max_size_; }
  std::size_t id(std::string_view word) const;
  const std::string& word(std::size_t id) const;
  bool contains(std::string_view word) const;
  const std::vector<std::string>& words() const { return words_; }

  // Appends a word; returns its id. Existing words keep their id.
  std::size_t add(const std::string& word);

  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path, std::size_t max_size = 50000);

 private:
  friend Vocabulary build_vocabulary(const Corpus&, std::size_t);
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<std::string> words_;
  std::size_t max_size_ = 50000;
};

struct EmbeddingTable {
  Matrix table;  // vocab size x dim

  Eigen::Index dim() const { return table.cols(); }
  Eigen::Index rows() const { return table.rows(); }
};

std::vector<std::string> tokenize(std::string_view raw_text);

bool is_punctuation(std::string_view token);

Vocabulary build_vocabulary(const Corpus& corpus, std::size_t max_size = 50000);

// Sets Token::vocab_id for every token in the corpus.
void assign_vocab_ids(Corpus& corpus, const Vocabulary& vocab);

EmbeddingTable load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                               Eigen::Index dim);
void save_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                     const EmbeddingTable& emb);

// Dependency edges used when a sentence carries no parse: (i, i+1).
std::vector<DepEdge> linear_chain_edges(std::size_t n_tokens);

void validate(const Document& doc);

// Parses one JSONL line; `line_no` is only used in messages.
Document parse_document(std::string_view json_line, std::size_t line_no = 0);
std::string serialize_document(const Document& doc);

Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

struct OracleStep {
  std::size_t sentence;
  double score;
};

struct OracleOptions {
  std::size_t max_oracle = 3;
};

// Greedy oracle selection trace; each step records the pick and the
// resulting mean(R-1 F1, R-2 F1) of the selected set.
std::vector<OracleStep> greedy_oracle_trace(const Document& doc, const OracleOptions& options = {});

std::vector<int> extract_oracle_labels(const Document& doc, std::size_t max_oracle = 3);

// Mean of R-1 and R-2 F1 for the given sentence subset (document order) vs the reference.
double oracle_objective(const Document& doc, const std::vector<std::size_t>& selected);

// Selected sentences concatenated in document order.
std::vector<std::string> concat_sentences(const Document& doc,
                                          const std::vector<std::size_t>& selected);

}  // namespace multigras
