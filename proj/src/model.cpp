#include "multigras/model.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>

namespace multigras::model {

namespace rel {
constexpr const char* kSyntactic = "syntactic";
constexpr const char* kSemantic = "semantic";
constexpr const char* kNatural = "natural";
}  // namespace rel

// ---------------------------------------------------------------------------
// Config

void ModelConfig::validate() const {
  if (d < 2 || d % 2 != 0) throw ConfigError("model: d must be a positive even number, got " + std::to_string(d));
  if (skip_gcn_layers < 1) throw ConfigError("model: skip_gcn_layers must be >= 1");
  if (lstm_layers < 1) throw ConfigError("model: lstm_layers must be >= 1");
  if (word_gcn && word_relations().empty())
    throw ConfigError("model: word block needs at least one relation (syntactic or word-semantic)");
  if (sentence_gcn && sentence_relations().empty())
    throw ConfigError("model: sentence block needs at least one relation (sentence-semantic or natural)");
  if (top_k < 1) throw ConfigError("model: top_k must be >= 1");
  if (max_sentences < 1 || max_tokens < 1) throw ConfigError("model: truncation limits must be >= 1");
  if (semantic_threshold < 0.0) throw ConfigError("model: semantic_threshold must be >= 0");
}

std::vector<std::string> ModelConfig::word_relations() const {
  std::vector<std::string> out;
  if (syntactic) out.emplace_back(rel::kSyntactic);
  if (word_semantic) out.emplace_back(rel::kSemantic);
  return out;
}

std::vector<std::string> ModelConfig::sentence_relations() const {
  std::vector<std::string> out;
  if (sentence_semantic) out.emplace_back(rel::kSemantic);
  if (natural) out.emplace_back(rel::kNatural);
  return out;
}

nlohmann::json ModelConfig::to_json() const {
  return {
      {"d", d},
      {"vocab_size", vocab_size},
      {"skip_gcn_layers", skip_gcn_layers},
      {"lstm_layers", lstm_layers},
      {"syntactic", syntactic},
      {"word_semantic", word_semantic},
      {"sentence_semantic", sentence_semantic},
      {"natural", natural},
      {"natural_weighted", natural_weighted},
      {"word_gcn", word_gcn},
      {"sentence_gcn", sentence_gcn},
      {"word_inner_skip", word_inner_skip},
      {"word_outer_skip", word_outer_skip},
      {"sentence_inner_skip", sentence_inner_skip},
      {"sentence_outer_skip", sentence_outer_skip},
      {"contextual", contextual},
      {"trigram_blocking", trigram_blocking},
      {"top_k", top_k},
      {"detach_semantic_graph", detach_semantic_graph},
      {"semantic_threshold", semantic_threshold},
      {"min_df", min_df},
      {"max_sentences", max_sentences},
      {"max_tokens", max_tokens},
      {"forget_bias", forget_bias},
  };
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("d", c.d);
  get("vocab_size", c.vocab_size);
  get("skip_gcn_layers", c.skip_gcn_layers);
  get("lstm_layers", c.lstm_layers);
  get("syntactic", c.syntactic);
  get("word_semantic", c.word_semantic);
  get("sentence_semantic", c.sentence_semantic);
  get("natural", c.natural);
  get("natural_weighted", c.natural_weighted);
  get("word_gcn", c.word_gcn);
  get("sentence_gcn", c.sentence_gcn);
  get("word_inner_skip", c.word_inner_skip);
  get("word_outer_skip", c.word_outer_skip);
  get("sentence_inner_skip", c.sentence_inner_skip);
  get("sentence_outer_skip", c.sentence_outer_skip);
  get("contextual", c.contextual);
  get("trigram_blocking", c.trigram_blocking);
  get("top_k", c.top_k);
  get("detach_semantic_graph", c.detach_semantic_graph);
  get("semantic_threshold", c.semantic_threshold);
  get("min_df", c.min_df);
  get("max_sentences", c.max_sentences);
  get("max_tokens", c.max_tokens);
  get("forget_bias", c.forget_bias);
  return c;
}

// ---------------------------------------------------------------------------
// Inputs

DocumentInputs prepare_document(const Document& doc, const EmbeddingTable& emb,
                                const graphs::TfidfModel& tfidf, const ModelConfig& config) {
  validate(doc);
  DocumentInputs in;
  in.id = doc.id;
  const std::size_t m_count = std::min(doc.size(), config.max_sentences);

  Document truncated;
  truncated.id = doc.id;
  for (std::size_t m = 0; m < m_count; ++m) {
    const auto& s = doc.sentences[m];
    const std::size_t n = std::min(s.tokens.size(), config.max_tokens);
    Sentence cut;
    cut.tokens.assign(s.tokens.begin(), s.tokens.begin() + static_cast<std::ptrdiff_t>(n));
    for (const auto& [h, dep] : s.dep_edges)
      if (h < n && dep < n) cut.dep_edges.emplace_back(h, dep);

    SentenceInput si;
    si.embeddings = Matrix(static_cast<Index>(n), emb.dim());
    for (std::size_t k = 0; k < n; ++k) {
      const auto id = static_cast<Index>(cut.tokens[k].vocab_id);
      if (id >= emb.rows()) throw std::out_of_range("prepare_document: vocab id outside embedding table");
      si.embeddings.row(static_cast<Index>(k)) = emb.table.row(id);
    }
    si.syntactic = graphs::normalize_adjacency(graphs::build_syntactic_graph(n, cut.dep_edges));
    si.tokens = cut.surfaces();
    in.sentences.push_back(std::move(si));
    truncated.sentences.push_back(std::move(cut));
  }
  in.natural = graphs::normalize_adjacency(
      graphs::build_natural_connection_graph(truncated, tfidf, config.natural_weighted));
  if (doc.oracle_labels) in.labels.assign(doc.oracle_labels->begin(), doc.oracle_labels->begin() + static_cast<std::ptrdiff_t>(m_count));
  return in;
}

// ---------------------------------------------------------------------------
// Model

Model::Model(const ModelConfig& config, Index emb_dim, std::uint64_t seed) : config_(config), emb_dim_(emb_dim) {
  config_.validate();
  if (emb_dim < 1) throw ConfigError("model: embedding width must be >= 1");
  const Index d = config_.d;
  layers::Initializer init(seed, d);
  word_.lstm = layers::register_bilstm(params_, "word", emb_dim, d, config_.lstm_layers, init, config_.forget_bias);
  if (config_.word_gcn)
    word_.gcn = layers::register_multi_gcn(params_, "word", config_.word_relations(), d, config_.skip_gcn_layers, init);
  sentence_.lstm = layers::register_bilstm(params_, "sentence", d, d, config_.lstm_layers, init, config_.forget_bias);
  if (config_.sentence_gcn)
    sentence_.gcn =
        layers::register_multi_gcn(params_, "sentence", config_.sentence_relations(), d, config_.skip_gcn_layers, init);

  selector_.reading_weight = &params_.add("selector.reading.weight", init.weight(d, d));
  selector_.reading_bias = &params_.add("selector.reading.bias", layers::Initializer::bias(d));
  if (config_.contextual) {
    selector_.post_weight = &params_.add("selector.post.weight", init.weight(3 * d, d));
    selector_.post_bias = &params_.add("selector.post.bias", layers::Initializer::bias(d));
  }
  selector_.score_weight = &params_.add("selector.score.weight", init.weight(d, 1));
  selector_.score_bias = &params_.add("selector.score.bias", layers::Initializer::bias(1));
}

nlohmann::json Model::checkpoint_metadata() const {
  return {{"model", config_.to_json()}, {"emb_dim", emb_dim_}};
}

void Model::save(const std::filesystem::path& path) const {
  ad::save_checkpoint(path, params_, checkpoint_metadata());
}

Model Model::load(const std::filesystem::path& path) {
  const auto meta = ad::read_checkpoint_metadata(path);
  if (!meta.contains("model") || !meta.contains("emb_dim"))
    throw ParseError(path.string() + ": checkpoint carries no model configuration");
  Model model(ModelConfig::from_json(meta.at("model")), meta.at("emb_dim").get<Index>(), 0);
  ad::load_checkpoint(path, model.params_);
  return model;
}

// ---------------------------------------------------------------------------
// Forward

Var semantic_adjacency(Tape& tape, Var x, const ModelConfig& config) {
  if (config.detach_semantic_graph)
    return tape.constant(graphs::normalize_adjacency(graphs::build_semantic_graph(x.value(), config.semantic_threshold)));
  Var a = ad::abs(matmul(x, transpose(x)));
  if (config.semantic_threshold > 0.0) a = ad::threshold_below(a, config.semantic_threshold);
  return ad::normalize_adjacency(a);
}

Var word_block(Tape& tape, const Model& model, const SentenceInput& sentence) {
  const auto& cfg = model.config();
  Var x = layers::bilstm(tape, tape.constant(sentence.embeddings), model.word_block().lstm);
  if (!cfg.word_gcn) return rowwise_max_pool(x);
  std::vector<layers::RelationInput> graph;
  if (cfg.syntactic) graph.push_back({rel::kSyntactic, tape.constant(sentence.syntactic)});
  if (cfg.word_semantic) graph.push_back({rel::kSemantic, semantic_adjacency(tape, x, cfg)});
  Var h = layers::multi_gcn(tape, x, graph, model.word_block().gcn,
                              {cfg.word_inner_skip, cfg.word_outer_skip});
  return rowwise_max_pool(h);
}

SentenceBlockOutput sentence_block(Tape& tape, const Model& model, Var sentence_embeddings,
                                   const Matrix& natural) {
  const auto& cfg = model.config();
  Var x = layers::bilstm(tape, sentence_embeddings, model.sentence_block().lstm);
  Var h = x;
  if (cfg.sentence_gcn) {
    std::vector<layers::RelationInput> graph;
    if (cfg.sentence_semantic) graph.push_back({rel::kSemantic, semantic_adjacency(tape, x, cfg)});
    if (cfg.natural) graph.push_back({rel::kNatural, tape.constant(natural)});
    h = layers::multi_gcn(tape, x, graph, model.sentence_block().gcn,
                          {cfg.sentence_inner_skip, cfg.sentence_outer_skip});
  }
  return {h, rowwise_max_pool(h)};
}

Var selector_score(Tape& tape, const Model& model, Var states, Var document, Var sentence_embeddings) {
  const auto& p = model.selector();
  Var o = tanh(add(matmul(states, tape.parameter(*p.reading_weight)), tape.parameter(*p.reading_bias)));
  if (model.config().contextual) {
    // Broadcast e_d to every sentence row through a ones column.
    Var doc_rows = matmul(tape.constant(Matrix::Ones(states.rows(), 1)), document);
    Var context = ad::concat({o, doc_rows, sentence_embeddings}, 1);
    o = tanh(add(matmul(context, tape.parameter(*p.post_weight)), tape.parameter(*p.post_bias)));
  }
  return sigmoid(add(matmul(o, tape.parameter(*p.score_weight)), tape.parameter(*p.score_bias)));
}

ForwardResult forward(Tape& tape, const Model& model, const DocumentInputs& inputs) {
  if (inputs.sentences.empty()) throw ValidationError("forward: document '" + inputs.id + "' has no sentences");
  std::vector<Var> rows;
  rows.reserve(inputs.size());
  for (const auto& s : inputs.sentences) rows.push_back(word_block(tape, model, s));
  Var e_s = concat(rows, 0);
  auto block = sentence_block(tape, model, e_s, inputs.natural);
  Var scores = selector_score(tape, model, block.states, block.document, e_s);
  return {scores, e_s, block.states, block.document};
}

Var bce_loss(Var scores, std::span<const int> labels) { return ad::binary_cross_entropy(scores, labels); }

std::vector<double> predict(const Model& model, const DocumentInputs& inputs) {
  Tape tape(false);
  auto result = forward(tape, model, inputs);
  const auto& v = result.scores.value();
  return std::vector<double>(v.data(), v.data() + v.size());
}

// ---------------------------------------------------------------------------
// Selection

namespace {

using Trigram = std::array<std::string, 3>;

std::set<Trigram> trigrams(const std::vector<std::string>& tokens) {
  std::set<Trigram> out;
  for (std::size_t i = 0; i + 3 <= tokens.size(); ++i) out.insert({tokens[i], tokens[i + 1], tokens[i + 2]});
  return out;
}

}  // namespace

std::vector<std::size_t> select_summary(std::span<const double> scores,
                                        const std::vector<std::vector<std::string>>& sentences,
                                        std::size_t k, bool blocking) {
  if (k < 1) throw ConfigError("select_summary: K must be >= 1");
  if (scores.size() != sentences.size())
    throw std::invalid_argument("select_summary: " + std::to_string(scores.size()) + " scores for " +
                                std::to_string(sentences.size()) + " sentences");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<std::size_t> selected;
  std::set<Trigram> seen;
  for (auto m : order) {
    if (selected.size() >= k) break;
    auto grams = trigrams(sentences[m]);
    if (blocking && std::any_of(grams.begin(), grams.end(), [&](const Trigram& g) { return seen.count(g) != 0; }))
      continue;
    selected.push_back(m);
    seen.insert(grams.begin(), grams.end());
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

std::vector<std::size_t> select_summary(std::span<const double> scores, const Document& doc, std::size_t k,
                                        bool blocking) {
  std::vector<std::vector<std::string>> sentences;
  const std::size_t m = std::min(scores.size(), doc.size());
  for (std::size_t i = 0; i < m; ++i) sentences.push_back(doc.sentences[i].surfaces());
  return select_summary(scores.first(m), sentences, k, blocking);
}

}  // namespace multigras::model
