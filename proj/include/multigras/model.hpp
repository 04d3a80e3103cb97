#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "multigras/autodiff.hpp"
#include "multigras/corpus.hpp"
#include "multigras/graphs.hpp"
#include "multigras/layers.hpp"

namespace multigras::model {

using ad::Index;
using ad::Tape;
using ad::Var;

struct ModelConfig {
  Index d = 300;
  std::size_t vocab_size = 50000;
  std::size_t skip_gcn_layers = 2;
  std::size_t lstm_layers = 2;

  // Relations.
  bool syntactic = true;
  bool word_semantic = true;
  bool sentence_semantic = true;
  bool natural = true;
  bool natural_weighted = true;  // off: binary "shares a keyword" edges

  // Multi-GCN structure. Disabling a block's Multi-GCN leaves Bi-LSTM + pooling.
  bool word_gcn = true;
  bool sentence_gcn = true;
  bool word_inner_skip = true;
  bool word_outer_skip = true;
  bool sentence_inner_skip = true;
  bool sentence_outer_skip = true;

  // Selector.
  bool contextual = true;
  bool trigram_blocking = true;
  std::size_t top_k = 3;

  bool detach_semantic_graph = false;
  double semantic_threshold = 0.0;
  std::size_t min_df = 100;
  std::size_t max_sentences = 100;
  std::size_t max_tokens = 100;
  double forget_bias = 1.0;

  void validate() const;
  std::vector<std::string> word_relations() const;
  std::vector<std::string> sentence_relations() const;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

/// Per-document tensors that do not depend on parameters.
struct SentenceInput {
  Matrix embeddings;  // n x d_emb
  Matrix syntactic;   // n x n, normalized
  std::vector<std::string> tokens;
};

struct DocumentInputs {
  std::string id;
  std::vector<SentenceInput> sentences;
  Matrix natural;            // M x M, normalized
  std::vector<int> labels;   // empty when the document carries no labels

  std::size_t size() const { return sentences.size(); }
};

/// Applies truncation and builds the parameter-free graphs for one document.
DocumentInputs prepare_document(const Document& doc, const EmbeddingTable& emb,
                                const graphs::TfidfModel& tfidf, const ModelConfig& config);

struct BlockParams {
  layers::BiLstmParams lstm;
  layers::MultiGcnParams gcn;  // empty relations when the block's Multi-GCN is off
};

struct SelectorParams {
  const ad::Tensor* reading_weight = nullptr;  // d x d
  const ad::Tensor* reading_bias = nullptr;
  const ad::Tensor* post_weight = nullptr;  // 3d x d, null without contextual info
  const ad::Tensor* post_bias = nullptr;
  const ad::Tensor* score_weight = nullptr;  // d x 1
  const ad::Tensor* score_bias = nullptr;
};

class Model {
 public:
  Model(const ModelConfig& config, Index emb_dim, std::uint64_t seed);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;

  const ModelConfig& config() const { return config_; }
  Index emb_dim() const { return emb_dim_; }
  ad::ParameterSet& parameters() { return params_; }
  const ad::ParameterSet& parameters() const { return params_; }

  const BlockParams& word_block() const { return word_; }
  const BlockParams& sentence_block() const { return sentence_; }
  const SelectorParams& selector() const { return selector_; }

  nlohmann::json checkpoint_metadata() const;
  void save(const std::filesystem::path& path) const;
  // Rebuilds the architecture stored in the checkpoint and loads its values.
  static Model load(const std::filesystem::path& path);

 private:
  ModelConfig config_;
  Index emb_dim_;
  ad::ParameterSet params_;
  BlockParams word_;
  BlockParams sentence_;
  SelectorParams selector_;
};

/// Semantic relation over node states: |X X^T|, normalized.
Var semantic_adjacency(Tape& tape, Var x, const ModelConfig& config);

/// Bi-LSTM -> Multi-GCN over {syntactic, semantic} -> max-pool. Returns 1 x d.
Var word_block(Tape& tape, const Model& model, const SentenceInput& sentence);

struct SentenceBlockOutput {
  Var states;    // h_s, M x d
  Var document;  // e_d, 1 x d
};

SentenceBlockOutput sentence_block(Tape& tape, const Model& model, Var sentence_embeddings,
                                   const Matrix& natural);

/// Reading, optional post-reading, sigmoid scoring. Returns M x 1 probabilities.
Var selector_score(Tape& tape, const Model& model, Var states, Var document, Var sentence_embeddings);

struct ForwardResult {
  Var scores;               // M x 1
  Var sentence_embeddings;  // e_s, M x d
  Var sentence_states;      // h_s, M x d
  Var document_embedding;   // e_d, 1 x d
};

ForwardResult forward(Tape& tape, const Model& model, const DocumentInputs& inputs);

Var bce_loss(Var scores, std::span<const int> labels);

/// Scores from a gradient-free forward pass.
std::vector<double> predict(const Model& model, const DocumentInputs& inputs);

/// Top-K by descending score (ties to the lower index), skipping candidates that share
/// a token trigram with an already selected sentence when `blocking` is on. Returned in
/// document order.
std::vector<std::size_t> select_summary(std::span<const double> scores,
                                        const std::vector<std::vector<std::string>>& sentences,
                                        std::size_t k, bool blocking);
std::vector<std::size_t> select_summary(std::span<const double> scores, const Document& doc,
                                        std::size_t k, bool blocking);

}  // namespace multigras::model
