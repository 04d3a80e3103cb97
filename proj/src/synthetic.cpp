#include "multigras/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace multigras::synthetic {

ToyCorpus make_toy_corpus(std::uint64_t seed, const ToyCorpusOptions& options) {
  if (options.min_sentences < options.oracle_per_doc || options.min_sentences > options.max_sentences ||
      options.min_tokens < 1 || options.min_tokens > options.max_tokens || options.filler_words < 1 ||
      options.salient_words < 1) {
    throw ConfigError("make_toy_corpus: inconsistent options");
  }
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::bernoulli_distribution salient(options.salient_rate);

  ToyCorpus out;
  for (std::size_t d = 0; d < options.documents; ++d) {
    Document doc;
    doc.id = "toy-" + std::to_string(d);
    const std::size_t m_count = uniform(options.min_sentences, options.max_sentences);
    std::vector<std::size_t> positions(m_count);
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    std::shuffle(positions.begin(), positions.end(), rng);
    positions.resize(options.oracle_per_doc);
    std::sort(positions.begin(), positions.end());

    for (std::size_t m = 0; m < m_count; ++m) {
      const bool injected = std::binary_search(positions.begin(), positions.end(), m);
      Sentence s;
      const std::size_t n = uniform(options.min_tokens, options.max_tokens);
      for (std::size_t k = 0; k < n; ++k) {
        std::string w = injected && salient(rng) ? "key" + std::to_string(uniform(0, options.salient_words - 1))
                                                 : "w" + std::to_string(uniform(0, options.filler_words - 1));
        s.tokens.push_back(Token{std::move(w), 0});
      }
      // Random projective-ish tree: every token after the first attaches to an earlier one.
      for (std::size_t k = 1; k < n; ++k) s.dep_edges.emplace_back(uniform(0, k - 1), k);
      doc.sentences.push_back(std::move(s));
    }
    for (auto m : positions) doc.reference_summary.push_back(doc.sentences[m].surfaces());
    out.corpus.documents.push_back(std::move(doc));
    out.injected.push_back(std::move(positions));
  }
  return out;
}

EmbeddingTable random_embeddings(const Vocabulary& vocab, Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  EmbeddingTable emb{Matrix::Zero(static_cast<Eigen::Index>(vocab.size()), dim)};
  for (Eigen::Index r = 1; r < emb.rows(); ++r)
    for (Eigen::Index c = 0; c < dim; ++c) emb.table(r, c) = dist(rng);
  return emb;
}

}  // namespace multigras::synthetic
