#include <doctest.h>

#include <cmath>
#include <numeric>

#include "multigras/graphs.hpp"
#include "support.hpp"

using namespace multigras;
using namespace multigras::graphs;

namespace {

Matrix permutation(const std::vector<Eigen::Index>& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, p[static_cast<std::size_t>(i)]) = 1.0;
  return m;
}

// Largest |eigenvalue| of a symmetric matrix by power iteration.
double spectral_radius(const Matrix& a) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(a.rows()) / std::sqrt(static_cast<double>(a.rows()));
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd w = a * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    lambda = norm;
    v = w / norm;
  }
  return lambda;
}

}  // namespace

TEST_SUITE("graphs") {

TEST_CASE("syntactic graph") {
  const auto a = build_syntactic_graph(3, {{0, 1}, {1, 2}});
  Matrix expected(3, 3);
  expected << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  CHECK(a == expected);
  CHECK(build_syntactic_graph(2, {}) == Matrix::Zero(2, 2));
  CHECK(build_syntactic_graph(3, {{0, 1}, {0, 1}, {1, 0}}) == build_syntactic_graph(3, {{0, 1}}));
  CHECK(build_syntactic_graph(2, {{1, 1}}) == Matrix::Zero(2, 2));
  CHECK_THROWS_AS(build_syntactic_graph(2, {{0, 2}}), std::out_of_range);
}

TEST_CASE("semantic graph") {
  Matrix eye = Matrix::Identity(2, 2);
  CHECK(build_semantic_graph(eye) == eye);
  Matrix x(2, 2);
  x << 1, 1, 1, -1;
  Matrix expected(2, 2);
  expected << 2, 0, 0, 2;
  CHECK(build_semantic_graph(x) == expected);

  std::mt19937_64 rng(4);
  const auto r = support::random_matrix(rng, 6, 5);
  const auto a = build_semantic_graph(r);
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(a(i, i) == doctest::Approx(r.row(i).squaredNorm()).epsilon(1e-14));
  const auto thresholded = build_semantic_graph(r, 0.5);
  CHECK((thresholded.array() == 0.0 || thresholded.array() >= 0.5).all());
}

TEST_CASE("semantic graph is permutation-equivariant") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    const auto x = support::random_matrix(rng, n, 4);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const Matrix p = permutation(perm);
    CHECK(build_semantic_graph(p * x) == p * build_semantic_graph(x) * p.transpose());
  }
}

TEST_CASE("normalize_adjacency") {
  CHECK(normalize_adjacency(Matrix::Zero(2, 2)) == Matrix::Identity(2, 2));
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  CHECK(normalize_adjacency(a).isApprox(Matrix::Constant(2, 2, 0.5), 1e-15));

  // Regular graphs (ring, complete): rows of the normalized matrix sum to 1.
  for (Eigen::Index n = 3; n <= 8; ++n) {
    Matrix ring = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) ring(i, (i + 1) % n) = ring((i + 1) % n, i) = 1.0;
    Matrix complete = Matrix::Ones(n, n) - Matrix::Identity(n, n);
    for (const Matrix& g : {ring, complete}) {
      const Eigen::VectorXd sums = normalize_adjacency(g).rowwise().sum();
      for (Eigen::Index i = 0; i < n; ++i) CHECK(sums(i) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("normalized graphs are symmetric with spectral radius at most one") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 1 + trial % 8;
    Matrix a = support::random_matrix(rng, n, n, 0.0, 3.0);
    a = (a + a.transpose()).eval();
    a.diagonal().setZero();
    const auto norm = normalize_adjacency(a);
    CHECK(is_valid_adjacency(norm));
    CHECK(spectral_radius(norm) <= 1.0 + 1e-9);
  }
}

TEST_CASE("tf-idf fitting") {
  Corpus corpus;
  corpus.documents.push_back(support::make_document({{"the", "city", "won", "."}}, {{"x"}}, "a"));
  corpus.documents.push_back(support::make_document({{"the", "city", "lost"}}, {{"x"}}, "b"));
  corpus.documents.push_back(support::make_document({{"the", "river"}}, {{"x"}}, "c"));
  const auto model = fit_tfidf(corpus, 2);
  CHECK(model.document_count() == 3);
  CHECK(model.is_keyword("city"));
  CHECK(model.df("city") == 2);
  CHECK_FALSE(model.is_keyword("the"));
  CHECK_FALSE(model.is_keyword("river"));
  CHECK_FALSE(model.is_keyword("."));
  CHECK(model.idf("city") == doctest::Approx(std::log(1.5)));
  CHECK(fit_tfidf(corpus).min_df() == 100);

  // Punctuation is never a keyword, even without a stopword list.
  const auto bare = fit_tfidf(corpus, 1, {});
  CHECK(bare.is_keyword("the"));
  CHECK_FALSE(bare.is_keyword("."));
}

TEST_CASE("sentence tf-idf uses raw counts and ln(N/df)") {
  // 10 documents, "w" in 3 of them: idf = ln(10/3).
  Corpus corpus;
  for (int i = 0; i < 10; ++i)
    corpus.documents.push_back(support::make_document({{i < 3 ? "w" : "v", "filler"}}, {{"x"}}));
  const auto model = fit_tfidf(corpus, 1, {});
  const auto s = support::make_sentence({"w", "w", "q", "filler"});
  const auto tf = sentence_tfidf(s, model);
  REQUIRE(tf.count("w") == 1);
  CHECK(tf.at("w") == doctest::Approx(2.0 * std::log(10.0 / 3.0)).epsilon(1e-14));
  CHECK(tf.count("q") == 0);
  CHECK(tf.at("filler") == 0.0);  // df = N: idf = 0
}

TEST_CASE("natural connection graph") {
  // Hand case: one shared keyword with tf-idf 0.5 and 0.4 gives 0.2. Build idf = 1
  // with N = e^1 * df is impossible in integers, so scale by construction instead.
  Corpus corpus;
  for (int i = 0; i < 4; ++i)
    corpus.documents.push_back(support::make_document({{i == 0 ? "k" : "z", "pad"}}, {{"x"}}));
  const auto model = fit_tfidf(corpus, 1, {});
  const double idf = std::log(4.0);
  const auto doc = support::make_document({{"k", "a"}, {"k", "k", "b"}, {"c"}}, {{"x"}});
  const auto a = build_natural_connection_graph(doc, model);
  CHECK(a(0, 1) == doctest::Approx(2.0 * idf * idf).epsilon(1e-14));
  CHECK(a(1, 0) == a(0, 1));
  CHECK(a(0, 2) == 0.0);
  CHECK(a.diagonal().isZero());
  const auto binary = build_natural_connection_graph(doc, model, false);
  CHECK(binary(0, 1) == 1.0);
  CHECK(binary(1, 2) == 0.0);

  const auto none = support::make_document({{"a"}, {"b"}}, {{"x"}});
  CHECK(build_natural_connection_graph(none, model) == Matrix::Zero(2, 2));
}

TEST_CASE("natural graph equals G G^T and ignores token order") {
  std::mt19937_64 rng(31);
  Corpus corpus;
  for (int i = 0; i < 12; ++i) corpus.documents.push_back(support::random_document(rng, 4, 7, 15));
  const auto model = fit_tfidf(corpus, 2, {});
  for (const auto& doc : corpus.documents) {
    const auto a = build_natural_connection_graph(doc, model);
    Matrix g = tfidf_matrix(doc, model);
    Matrix oracle = g * g.transpose();
    oracle.diagonal().setZero();
    CHECK((a - oracle).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((a - support::brute_natural_graph(doc, corpus, 2, {})).cwiseAbs().maxCoeff() <= 1e-12);
    auto shuffled = doc;
    for (auto& s : shuffled.sentences) std::shuffle(s.tokens.begin(), s.tokens.end(), rng);
    CHECK(build_natural_connection_graph(shuffled, model) == a);
  }
}

TEST_CASE("tf-idf model save and load") {
  std::mt19937_64 rng(3);
  Corpus corpus;
  for (int i = 0; i < 6; ++i) corpus.documents.push_back(support::random_document(rng, 3, 6, 10));
  const auto model = fit_tfidf(corpus, 2);
  const auto dir = support::scratch_dir("tfidf");
  model.save(dir / "t.json");
  const auto back = TfidfModel::load(dir / "t.json");
  CHECK(back.keywords() == model.keywords());
  CHECK(back.document_count() == model.document_count());
  CHECK(back.min_df() == model.min_df());
}

TEST_CASE("builders produce valid adjacency on random inputs") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 9);
    std::uniform_int_distribution<std::size_t> node(0, n - 1);
    std::vector<DepEdge> edges;
    for (std::size_t e = 0; e < n; ++e) edges.emplace_back(node(rng), node(rng));
    CHECK(is_valid_adjacency(build_syntactic_graph(n, edges)));
    CHECK(is_valid_adjacency(build_semantic_graph(support::random_matrix(rng, static_cast<Eigen::Index>(n), 6))));
  }
  Matrix bad(2, 2);
  bad << 0, 1, 2, 0;
  CHECK_FALSE(is_valid_adjacency(bad));
  bad << 0, -1, -1, 0;
  CHECK_FALSE(is_valid_adjacency(bad));
}

TEST_CASE("multiplex graph requires one node set") {
  MultiplexGraph g;
  g.add("a", Matrix::Zero(3, 3));
  CHECK(g.node_count() == 3);
  CHECK_THROWS(g.add("b", Matrix::Zero(2, 2)));
}

TEST_CASE("shipped stopword file matches the built-in list") {
  const auto loaded = load_stopwords(std::filesystem::path(MULTIGRAS_DATA_DIR) / "stopwords_en.txt");
  CHECK(loaded == default_stopwords());
  CHECK(default_stopwords().count("the") == 1);
}

}  // TEST_SUITE
