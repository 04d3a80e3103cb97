#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "multigras/corpus.hpp"

namespace multigras::synthetic {

struct ToyCorpusOptions {
  std::size_t documents = 20;
  std::size_t min_sentences = 5;
  std::size_t max_sentences = 7;
  std::size_t min_tokens = 6;
  std::size_t max_tokens = 9;
  std::size_t oracle_per_doc = 2;
  std::size_t filler_words = 120;
  std::size_t salient_words = 24;
  double salient_rate = 0.6;  // share of salient tokens inside injected oracle sentences
};

struct ToyCorpus {
  Corpus corpus;
  std::vector<std::vector<std::size_t>> injected;  // oracle sentence indices per document
};

/// Documents whose reference summary copies `oracle_per_doc` injected sentences verbatim.
/// Injected sentences draw most tokens from a salient word pool; the rest use filler words.
ToyCorpus make_toy_corpus(std::uint64_t seed, const ToyCorpusOptions& options = {});

/// Uniform(-0.5, 0.5) rows for every vocabulary word; UNK stays zero.
EmbeddingTable random_embeddings(const Vocabulary& vocab, Eigen::Index dim, std::uint64_t seed);

}  // namespace multigras::synthetic
