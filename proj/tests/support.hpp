#pragma once

// Shared fixtures and independent reference implementations for the tests.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "multigras/corpus.hpp"
#include "multigras/graphs.hpp"
#include "multigras/model.hpp"
#include "multigras/trainer.hpp"

namespace support {

using multigras::Matrix;
using Tokens = std::vector<std::string>;

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double lo = -1.0,
                     double hi = 1.0);

// Tokens drawn from a small alphabet "t0".."t{alphabet-1}" so overlaps are common.
Tokens random_tokens(std::mt19937_64& rng, std::size_t length, std::size_t alphabet);

multigras::Sentence make_sentence(const Tokens& tokens);
multigras::Document make_document(const std::vector<Tokens>& sentences, const std::vector<Tokens>& summary,
                                  std::string id = "doc");

// Random document with M sentences over a small alphabet and a random reference summary.
multigras::Document random_document(std::mt19937_64& rng, std::size_t m, std::size_t max_len,
                                    std::size_t alphabet);

// --- Brute-force ROUGE: enumerate n-gram lists and count by linear scans. ---
struct BruteCounts {
  std::size_t overlap = 0;
  std::size_t candidate_total = 0;
  std::size_t reference_total = 0;
};
BruteCounts brute_ngram_counts(const Tokens& candidate, const Tokens& reference, std::size_t n);
// LCS by exhaustive subsequence search (2^|a| subsets); only for |a| <= 12.
std::size_t brute_lcs(const Tokens& a, const Tokens& b);
double brute_f1(std::size_t overlap, std::size_t cand_total, std::size_t ref_total);

// Mean of brute-force R-1 and R-2 F1 of the selected sentences (document order).
double brute_oracle_objective(const multigras::Document& doc, const std::vector<std::size_t>& selected);

// Plain restatement of the selection rule: walk sentences by descending score (lower
// index first on ties) and keep one unless it shares a token trigram with a kept one.
std::vector<std::size_t> brute_select(const std::vector<double>& scores, const std::vector<Tokens>& sentences,
                                      std::size_t k, bool blocking);
bool shares_trigram(const Tokens& a, const Tokens& b);

// tf-idf computed directly from counts: tf = raw count, idf = ln(N / df).
Matrix brute_natural_graph(const multigras::Document& doc, const multigras::Corpus& corpus, std::size_t min_df,
                           const std::set<std::string>& stopwords);

// Toy corpus with oracle labels plus the resources the model needs.
struct ToySetup {
  multigras::Corpus corpus;
  std::vector<std::vector<std::size_t>> injected;
  multigras::Vocabulary vocab;
  multigras::EmbeddingTable embeddings;
  multigras::graphs::TfidfModel tfidf;

  multigras::trainer::Resources resources() const { return {&embeddings, &tfidf}; }
};
ToySetup make_toy_setup(std::uint64_t seed, Eigen::Index emb_dim, std::size_t documents = 20);

multigras::model::ModelConfig small_config(Eigen::Index d);

// Fresh directory under the build tree for files written by a test.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace support
