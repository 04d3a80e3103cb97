#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "multigras/synthetic.hpp"

namespace support {

using namespace multigras;

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = dist(rng);
  return m;
}

Tokens random_tokens(std::mt19937_64& rng, std::size_t length, std::size_t alphabet) {
  std::uniform_int_distribution<std::size_t> pick(0, alphabet - 1);
  Tokens out;
  for (std::size_t i = 0; i < length; ++i) out.push_back("t" + std::to_string(pick(rng)));
  return out;
}

Sentence make_sentence(const Tokens& tokens) {
  Sentence s;
  for (const auto& t : tokens) s.tokens.push_back(Token{t, 0});
  s.dep_edges = linear_chain_edges(tokens.size());
  return s;
}

Document make_document(const std::vector<Tokens>& sentences, const std::vector<Tokens>& summary, std::string id) {
  Document doc;
  doc.id = std::move(id);
  for (const auto& s : sentences) doc.sentences.push_back(make_sentence(s));
  doc.reference_summary = summary;
  return doc;
}

Document random_document(std::mt19937_64& rng, std::size_t m, std::size_t max_len, std::size_t alphabet) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::vector<Tokens> sentences;
  for (std::size_t i = 0; i < m; ++i) sentences.push_back(random_tokens(rng, len(rng), alphabet));
  std::vector<Tokens> summary{random_tokens(rng, len(rng), alphabet), random_tokens(rng, len(rng), alphabet)};
  return make_document(sentences, summary);
}

namespace {

std::vector<Tokens> ngram_list(const Tokens& t, std::size_t n) {
  std::vector<Tokens> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) out.emplace_back(t.begin() + static_cast<long>(i), t.begin() + static_cast<long>(i + n));
  return out;
}

std::size_t occurrences(const std::vector<Tokens>& list, const Tokens& g) {
  return static_cast<std::size_t>(std::count(list.begin(), list.end(), g));
}

}  // namespace

BruteCounts brute_ngram_counts(const Tokens& candidate, const Tokens& reference, std::size_t n) {
  const auto c = ngram_list(candidate, n);
  const auto r = ngram_list(reference, n);
  BruteCounts out{0, c.size(), r.size()};
  std::vector<Tokens> seen;
  for (const auto& g : c) {
    if (std::find(seen.begin(), seen.end(), g) != seen.end()) continue;
    seen.push_back(g);
    out.overlap += std::min(occurrences(c, g), occurrences(r, g));
  }
  return out;
}

std::size_t brute_lcs(const Tokens& a, const Tokens& b) {
  std::size_t best = 0;
  const std::size_t subsets = std::size_t{1} << a.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    Tokens sub;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (mask & (std::size_t{1} << i)) sub.push_back(a[i]);
    if (sub.size() <= best) continue;
    // Is `sub` a subsequence of b?
    std::size_t j = 0;
    for (const auto& t : b)
      if (j < sub.size() && sub[j] == t) ++j;
    if (j == sub.size()) best = sub.size();
  }
  return best;
}

double brute_f1(std::size_t overlap, std::size_t cand_total, std::size_t ref_total) {
  if (cand_total + ref_total == 0) return 0.0;
  return 2.0 * static_cast<double>(overlap) / static_cast<double>(cand_total + ref_total);
}

double brute_oracle_objective(const Document& doc, const std::vector<std::size_t>& selected) {
  std::vector<std::size_t> order = selected;
  std::sort(order.begin(), order.end());
  Tokens cand;
  for (auto i : order)
    for (const auto& t : doc.sentences[i].tokens) cand.push_back(t.surface);
  Tokens ref;
  for (const auto& s : doc.reference_summary) ref.insert(ref.end(), s.begin(), s.end());
  const auto one = brute_ngram_counts(cand, ref, 1);
  const auto two = brute_ngram_counts(cand, ref, 2);
  return 0.5 * (brute_f1(one.overlap, one.candidate_total, one.reference_total) +
                brute_f1(two.overlap, two.candidate_total, two.reference_total));
}

bool shares_trigram(const Tokens& a, const Tokens& b) {
  for (std::size_t i = 0; i + 3 <= a.size(); ++i)
    for (std::size_t j = 0; j + 3 <= b.size(); ++j)
      if (a[i] == b[j] && a[i + 1] == b[j + 1] && a[i + 2] == b[j + 2]) return true;
  return false;
}

std::vector<std::size_t> brute_select(const std::vector<double>& scores, const std::vector<Tokens>& sentences,
                                      std::size_t k, bool blocking) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Selection sort: repeatedly take the highest remaining score, lowest index on ties.
  std::vector<std::size_t> ranked;
  std::vector<bool> used(scores.size(), false);
  for (std::size_t step = 0; step < scores.size(); ++step) {
    std::size_t best = scores.size();
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (!used[i] && (best == scores.size() || scores[i] > scores[best])) best = i;
    used[best] = true;
    ranked.push_back(best);
  }
  std::vector<std::size_t> chosen;
  for (auto i : ranked) {
    if (chosen.size() == k) break;
    bool blocked = false;
    for (auto j : chosen) blocked = blocked || (blocking && shares_trigram(sentences[i], sentences[j]));
    if (!blocked) chosen.push_back(i);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

Matrix brute_natural_graph(const Document& doc, const Corpus& corpus, std::size_t min_df,
                           const std::set<std::string>& stopwords) {
  std::map<std::string, std::size_t> df;
  for (const auto& d : corpus.documents) {
    std::set<std::string> words;
    for (const auto& s : d.sentences)
      for (const auto& t : s.tokens) words.insert(t.surface);
    for (const auto& w : words) ++df[w];
  }
  const auto n_docs = static_cast<double>(corpus.size());
  auto keyword = [&](const std::string& w) {
    return df[w] >= min_df && stopwords.count(w) == 0 && !is_punctuation(w);
  };
  const auto m = doc.size();
  // G: sentence x word, over every distinct word of the document.
  std::vector<std::string> vocab;
  for (const auto& s : doc.sentences)
    for (const auto& t : s.tokens)
      if (std::find(vocab.begin(), vocab.end(), t.surface) == vocab.end()) vocab.push_back(t.surface);
  Matrix g = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t w = 0; w < vocab.size(); ++w) {
      if (!keyword(vocab[w])) continue;
      double tf = 0;
      for (const auto& t : doc.sentences[i].tokens) tf += t.surface == vocab[w] ? 1.0 : 0.0;
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) =
          tf * std::log(n_docs / static_cast<double>(df[vocab[w]]));
    }
  }
  Matrix a = g * g.transpose();
  a.diagonal().setZero();
  return a;
}

ToySetup make_toy_setup(std::uint64_t seed, Eigen::Index emb_dim, std::size_t documents) {
  synthetic::ToyCorpusOptions opts;
  opts.documents = documents;
  auto toy = synthetic::make_toy_corpus(seed, opts);
  ToySetup out;
  out.corpus = std::move(toy.corpus);
  out.injected = std::move(toy.injected);
  out.vocab = build_vocabulary(out.corpus, 50000);
  assign_vocab_ids(out.corpus, out.vocab);
  for (auto& doc : out.corpus.documents) doc.oracle_labels = extract_oracle_labels(doc, 3);
  out.embeddings = synthetic::random_embeddings(out.vocab, emb_dim, seed + 1);
  out.tfidf = graphs::fit_tfidf(out.corpus, 2);
  return out;
}

model::ModelConfig small_config(Eigen::Index d) {
  model::ModelConfig cfg;
  cfg.d = d;
  return cfg;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(MULTIGRAS_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace support
