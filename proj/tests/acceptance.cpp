// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "multigras/rouge.hpp"
#include "multigras/trainer.hpp"
#include "support.hpp"

using namespace multigras;
using ad::Var;
using support::Tokens;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& fn) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %-28s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

// Symmetric, nonnegative, finite; checked entry by entry.
bool well_formed(const Matrix& a) {
  if (a.rows() != a.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!std::isfinite(a(i, j)) || a(i, j) < 0.0 || a(i, j) != a(j, i)) return false;
  return true;
}

Matrix permutation(std::mt19937_64& rng, Eigen::Index n) {
  std::vector<Eigen::Index> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Eigen::Index{0});
  std::shuffle(p.begin(), p.end(), rng);
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, p[static_cast<std::size_t>(i)]) = 1.0;
  return m;
}

// --- 1 ---------------------------------------------------------------------

Outcome gradient_check() {
  trainer::GradCheckSuiteOptions opts;
  opts.seed = 7;
  opts.d = 16;
  opts.step = 1e-5;
  const auto r = trainer::run_grad_check_suite(opts);
  std::string detail = fmt("max rel err %.3g over %.0f coords, %.0f at kinks;", r.report.max_relative_error,
                           static_cast<double>(r.report.coordinates_checked),
                           static_cast<double>(r.report.coordinates_at_kinks));
  for (const auto& [group, err] : r.per_group) detail += " " + group + fmt(" %.2g", err);
  return {r.report.max_relative_error < 1e-3 && r.seconds < 60.0 && r.per_group.size() == 3, detail};
}

// --- 2 ---------------------------------------------------------------------

Outcome zero_weight_collapse() {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Eigen::Index d = 8;
    model::Model m(support::small_config(d), d, seed);
    for (const auto& name : {"word.fusion.weight", "word.fusion.bias", "sentence.fusion.weight", "sentence.fusion.bias"})
      m.parameters().at(name).value().setZero();
    std::mt19937_64 rng(seed);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(seed % 7);
    const Matrix x = support::random_matrix(rng, n, d);
    Matrix other = support::random_matrix(rng, n, n, 0.0, 1.0);
    other = graphs::normalize_adjacency((other + other.transpose()).eval());

    for (const auto* block : {&m.word_block(), &m.sentence_block()}) {
      ad::Tape t;
      Var xs = t.constant(x);
      std::vector<layers::RelationInput> graph;
      for (const auto& rel : block->gcn.relations)
        graph.push_back({rel, rel == "semantic" ? model::semantic_adjacency(t, xs, m.config()) : t.constant(other)});
      if (layers::multi_gcn(t, xs, graph, block->gcn).value() != x) return {false, fmt("seed %.0f differs", double(seed))};
      ++checked;
    }
  }
  return {true, fmt("%.0f block outputs equal their input bit for bit", double(checked))};
}

// --- 3 ---------------------------------------------------------------------

Outcome graph_invariants() {
  std::mt19937_64 rng(2024);
  double nat_err = 0.0;
  std::size_t bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(1 + trial % 10);
    const auto ni = static_cast<Eigen::Index>(n);
    std::uniform_int_distribution<std::size_t> node(0, n - 1);
    std::vector<DepEdge> edges;
    for (std::size_t e = 0; e < 2 * n; ++e) edges.emplace_back(node(rng), node(rng));
    if (!well_formed(graphs::build_syntactic_graph(n, edges))) ++bad;

    const Matrix x = support::random_matrix(rng, ni, 5);
    const Matrix sem = graphs::build_semantic_graph(x);
    if (!well_formed(sem)) ++bad;
    const Matrix p = permutation(rng, ni);
    if (graphs::build_semantic_graph(p * x) != p * sem * p.transpose()) ++bad;

    Matrix raw = support::random_matrix(rng, ni, ni, 0.0, 5.0);
    raw = (raw + raw.transpose()).eval();
    if (!well_formed(graphs::normalize_adjacency(raw))) ++bad;
    if (!well_formed(graphs::normalize_adjacency(sem))) ++bad;
  }
  for (int c = 0; c < 100; ++c) {
    Corpus corpus;
    for (int i = 0; i < 10; ++i) corpus.documents.push_back(support::random_document(rng, 1 + (c + i) % 8, 8, 12));
    const auto tfidf = graphs::fit_tfidf(corpus, 2, {});
    for (const auto& doc : corpus.documents) {
      const Matrix a = graphs::build_natural_connection_graph(doc, tfidf);
      if (!well_formed(a)) ++bad;
      const Matrix g = graphs::tfidf_matrix(doc, tfidf);
      Matrix oracle = g * g.transpose();
      oracle.diagonal().setZero();
      nat_err = std::max(nat_err, (a - oracle).cwiseAbs().maxCoeff());
      nat_err = std::max(nat_err, (a - support::brute_natural_graph(doc, corpus, 2, {})).cwiseAbs().maxCoeff());
    }
  }
  return {bad == 0 && nat_err <= 1e-12,
          fmt("%.0f violations; natural vs G G^T max diff %.3g over 1000 documents", double(bad), nat_err)};
}

// --- 4 ---------------------------------------------------------------------

Outcome rouge_equivalence() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> len(0, 10);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = support::random_tokens(rng, len(rng), 5);
    const auto b = support::random_tokens(rng, len(rng), 5);
    for (std::size_t n = 1; n <= 2; ++n) {
      const auto c = support::brute_ngram_counts(a, b, n);
      const auto s = rouge::rouge_n(a, b, n);
      const double p = c.candidate_total ? double(c.overlap) / double(c.candidate_total) : 0.0;
      const double r = c.reference_total ? double(c.overlap) / double(c.reference_total) : 0.0;
      if (s.precision != p || s.recall != r) ++mismatches;
      if (std::abs(s.f1 - support::brute_f1(c.overlap, c.candidate_total, c.reference_total)) > 1e-15) ++mismatches;
    }
    if (rouge::lcs_length(a, b) != support::brute_lcs(a, b)) ++mismatches;
  }
  const Tokens cand{"the", "cat", "sat"}, ref{"the", "cat", "ran"};
  double hand = 0.0;
  hand = std::max(hand, std::abs(rouge::rouge_n(cand, ref, 1).f1 - 2.0 / 3.0));
  hand = std::max(hand, std::abs(rouge::rouge_n(cand, ref, 2).f1 - 0.5));
  hand = std::max(hand, std::abs(rouge::rouge_l({"a", "b", "c", "d"}, {"a", "c", "b", "d"}).f1 - 0.75));
  return {mismatches == 0 && hand <= 1e-12,
          fmt("%.0f mismatches in 1000 pairs; hand cases max err %.3g", double(mismatches), hand)};
}

// --- 5 ---------------------------------------------------------------------

Outcome trigram_blocking() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> msize(1, 8), klen(1, 5), tlen(0, 7);
  std::uniform_int_distribution<int> coarse(0, 5);
  std::size_t mismatches = 0, violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = msize(rng);
    std::vector<Tokens> sents;
    std::vector<double> scores;
    for (std::size_t i = 0; i < m; ++i) {
      sents.push_back(support::random_tokens(rng, tlen(rng), 3));
      scores.push_back(coarse(rng) / 5.0);  // coarse values force ties
    }
    const std::size_t k = klen(rng);
    const bool blocking = trial % 4 != 0;
    const auto got = model::select_summary(scores, sents, k, blocking);
    if (got != support::brute_select(scores, sents, k, blocking)) ++mismatches;
    if (blocking)
      for (std::size_t i = 0; i < got.size(); ++i)
        for (std::size_t j = i + 1; j < got.size(); ++j)
          if (support::shares_trigram(sents[got[i]], sents[got[j]])) ++violations;
  }
  return {mismatches == 0 && violations == 0,
          fmt("%.0f mismatches, %.0f shared-trigram pairs in 1000 instances", double(mismatches), double(violations))};
}

// --- 6 and 10 share the overfit model ----------------------------------------

struct Overfit {
  support::ToySetup setup = support::make_toy_setup(1, 32, 20);
  model::Model model{support::small_config(32), 32, 1};
  trainer::TrainResult result;
  double seconds = 0.0;
};

Overfit& overfit() {
  static Overfit o = [] {
    Overfit out;
    trainer::TrainingConfig cfg;
    cfg.learning_rate = 0.0005;
    cfg.epochs = 200;
    cfg.seed = 1;
    const auto t0 = Clock::now();
    out.result = trainer::train(out.model, out.setup.corpus, nullptr, out.setup.resources(), cfg);
    out.seconds = seconds_since(t0);
    return out;
  }();
  return o;
}

Outcome overfit_test() {
  auto& o = overfit();
  const auto inputs = trainer::prepare_corpus(o.setup.corpus, o.setup.resources(), o.model.config());
  std::size_t exact = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& doc = o.setup.corpus.documents[i];
    std::vector<std::size_t> oracle;
    for (std::size_t s = 0; s < doc.size(); ++s)
      if ((*doc.oracle_labels)[s] == 1) oracle.push_back(s);
    const auto scores = model::predict(o.model, inputs[i]);
    if (model::select_summary(scores, doc, oracle.size(), true) == oracle) ++exact;
  }
  const double loss = o.result.epoch_losses.back();
  const double share = double(exact) / double(inputs.size());
  return {loss < 0.1 && share >= 0.9 && o.seconds < 600.0,
          fmt("final loss %.3g, exact oracle set on %.0f%% of documents, %.0fs training", loss, 100.0 * share,
              o.seconds)};
}

// --- 7 ---------------------------------------------------------------------

Outcome greedy_oracle() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> msize(1, 6);
  std::size_t mismatches = 0, steps = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto doc = support::random_document(rng, msize(rng), 8, 6);
    const auto trace = greedy_oracle_trace(doc, {3});
    std::vector<std::size_t> selected;
    double current = 0.0;
    std::size_t step = 0;
    while (selected.size() < 3 && selected.size() < doc.size()) {
      // Exhaustive argmax over every one-sentence extension, ties to the lower index.
      double best_score = -1.0;
      std::size_t best = doc.size();
      for (std::size_t m = 0; m < doc.size(); ++m) {
        if (std::find(selected.begin(), selected.end(), m) != selected.end()) continue;
        auto trial_set = selected;
        trial_set.push_back(m);
        std::sort(trial_set.begin(), trial_set.end());
        const double v = support::brute_oracle_objective(doc, trial_set);
        if (v > best_score + 1e-12) {
          best_score = v;
          best = m;
        }
      }
      if (!selected.empty() && best_score <= current + 1e-12) break;
      if (step >= trace.size() || trace[step].sentence != best ||
          std::abs(trace[step].score - best_score) > 1e-12)
        ++mismatches;
      selected.push_back(best);
      current = best_score;
      ++step;
    }
    if (step != trace.size()) ++mismatches;
    steps += step;
  }
  return {mismatches == 0, fmt("%.0f mismatches over %.0f greedy steps in 200 documents", double(mismatches),
                               double(steps))};
}

// --- 8 ---------------------------------------------------------------------

Outcome determinism() {
  auto once = [](std::string* ckpt) {
    const auto setup = support::make_toy_setup(8, 16, 10);
    model::Model m(support::small_config(16), 16, 8);
    trainer::TrainingConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 8;
    trainer::train(m, setup.corpus, nullptr, setup.resources(), cfg);
    *ckpt = ad::checkpoint_to_string(m.parameters(), m.checkpoint_metadata());
    return trainer::evaluate(m, setup.corpus, setup.resources(), 3, true, 2);
  };
  std::string a, b;
  const auto ra = once(&a);
  const auto rb = once(&b);
  bool same = a == b && ra.r1 == rb.r1 && ra.r2 == rb.r2 && ra.rl == rb.rl && ra.r1_recall == rb.r1_recall;
  for (std::size_t i = 0; same && i < ra.documents.size(); ++i)
    same = ra.documents[i].selected == rb.documents[i].selected && ra.documents[i].scores.r1.f1 == rb.documents[i].scores.r1.f1;
  return {same, fmt("checkpoints of %.0f bytes", double(a.size())) + (a == b ? " identical" : " differ")};
}

// --- 9 ---------------------------------------------------------------------

// Copies b's parameters into a, taking the rows of each fusion weight that belong to
// relations a keeps. Fusion rows follow the relation order, d rows each.
void copy_matching(model::Model& a, const model::Model& b) {
  const auto d = a.config().d;
  for (auto& [name, t] : a.parameters()) {
    const auto& src = b.parameters().at(name).value();
    if (src.rows() == t.value().rows()) {
      t.value() = src;
      continue;
    }
    const bool word = name.rfind("word.", 0) == 0;
    const auto& keep = word ? a.word_block().gcn.relations : a.sentence_block().gcn.relations;
    const auto& all = word ? b.word_block().gcn.relations : b.sentence_block().gcn.relations;
    for (std::size_t r = 0; r < keep.size(); ++r) {
      const auto at = std::find(all.begin(), all.end(), keep[r]) - all.begin();
      t.value().middleRows(static_cast<Eigen::Index>(r) * d, d) = src.middleRows(at * d, d);
    }
  }
}

double max_score_diff(const model::Model& a, const model::Model& b, const support::ToySetup& s) {
  double diff = 0.0;
  for (const auto& doc : s.corpus.documents) {
    const auto pa = model::predict(a, model::prepare_document(doc, s.embeddings, s.tfidf, a.config()));
    const auto pb = model::predict(b, model::prepare_document(doc, s.embeddings, s.tfidf, b.config()));
    for (std::size_t i = 0; i < pa.size(); ++i) diff = std::max(diff, std::abs(pa[i] - pb[i]));
  }
  return diff;
}

Outcome structural_ablations() {
  const Eigen::Index d = 8;
  const auto setup = support::make_toy_setup(4, d, 6);
  trainer::AblationOptions opts;
  opts.train_models = false;
  const auto rows = trainer::run_ablation(setup.corpus, setup.corpus, setup.resources(), support::small_config(d),
                                          trainer::TrainingConfig{}, trainer::standard_ablations(), opts);
  std::size_t count_mismatch = 0;
  for (const auto& r : rows)
    if (!r.counts_match()) ++count_mismatch;

  // Independent per-relation delta: L Skip-GCN layers (two d x d weights, one bias) and d fusion rows.
  const auto du = static_cast<std::size_t>(d);
  const std::size_t branch = 2 * (2 * du * du + du) + du * du;
  auto delta_of = [&](const std::string& name) {
    for (const auto& r : rows)
      if (r.name == name) return -r.delta;
    return 0LL;
  };
  std::size_t delta_mismatch = 0;
  for (const char* name : {"- semantic relation", "- natural connection relation"})
    if (delta_of(name) != static_cast<long long>(branch)) ++delta_mismatch;
  if (delta_of("- contextual information") != static_cast<long long>(3 * du * du + du)) ++delta_mismatch;
  for (const char* name : {"- trigram blocking", "- outer skip", "- inner skip", "- weights for natural connection"})
    if (delta_of(name) != 0) ++delta_mismatch;

  // Dropping a relation equals zeroing its fusion rows; dropping a block's Multi-GCN
  // equals zeroing its whole fusion layer.
  double eq_err = 0.0;
  using Toggle = std::function<void(model::ModelConfig&, model::Model&)>;
  const std::vector<Toggle> toggles{
      [&](model::ModelConfig& c, model::Model& full) {
        c.syntactic = false;
        full.parameters().at("word.fusion.weight").value().topRows(d).setZero();
      },
      [&](model::ModelConfig& c, model::Model& full) {
        c.word_semantic = false;
        full.parameters().at("word.fusion.weight").value().bottomRows(d).setZero();
      },
      [&](model::ModelConfig& c, model::Model& full) {
        c.sentence_semantic = false;
        full.parameters().at("sentence.fusion.weight").value().topRows(d).setZero();
      },
      [&](model::ModelConfig& c, model::Model& full) {
        c.natural = false;
        full.parameters().at("sentence.fusion.weight").value().bottomRows(d).setZero();
      },
      [&](model::ModelConfig& c, model::Model& full) {
        c.sentence_gcn = false;
        full.parameters().at("sentence.fusion.weight").value().setZero();
        full.parameters().at("sentence.fusion.bias").value().setZero();
      },
      [&](model::ModelConfig& c, model::Model& full) {
        c.word_gcn = false;
        full.parameters().at("word.fusion.weight").value().setZero();
        full.parameters().at("word.fusion.bias").value().setZero();
      },
  };
  for (const auto& toggle : toggles) {
    auto cfg = support::small_config(d);
    model::Model full(cfg, d, 3);
    toggle(cfg, full);
    model::Model reduced(cfg, d, 3);
    copy_matching(reduced, full);
    eq_err = std::max(eq_err, max_score_diff(full, reduced, setup));
  }

  // Inner skip: with an identity graph, dropping the skip and adding I to the GCN
  // weight gives the same layer. Outer skip: the outputs differ by exactly X.
  model::Model m(support::small_config(d), d, 5);
  std::mt19937_64 rng(5);
  const Matrix x = support::random_matrix(rng, 4, d);
  {
    ad::Tape t;
    const auto& branch_params = m.sentence_block().gcn.branches.front();
    const Matrix with = layers::skip_gcn(t, t.constant(Matrix::Identity(4, 4)), t.constant(x), branch_params, true).value();
    for (auto& [name, tensor] : m.parameters())
      if (name.rfind("sentence.semantic.", 0) == 0 && name.ends_with(".gcn_weight"))
        tensor.value() += Matrix::Identity(d, d);
    ad::Tape fresh;  // the first tape still holds the old weights
    const Matrix without =
        layers::skip_gcn(fresh, fresh.constant(Matrix::Identity(4, 4)), fresh.constant(x), branch_params, false).value();
    eq_err = std::max(eq_err, (with - without).cwiseAbs().maxCoeff());
  }
  {
    ad::Tape t;
    Var xs = t.constant(x);
    Matrix nat = support::random_matrix(rng, 4, 4, 0.0, 1.0);
    nat = graphs::normalize_adjacency((nat + nat.transpose()).eval());
    std::vector<layers::RelationInput> graph{{"semantic", model::semantic_adjacency(t, xs, m.config())},
                                             {"natural", t.constant(nat)}};
    const Matrix on = layers::multi_gcn(t, xs, graph, m.sentence_block().gcn, {true, true}).value();
    const Matrix off = layers::multi_gcn(t, xs, graph, m.sentence_block().gcn, {true, false}).value();
    eq_err = std::max(eq_err, (on - off - x).cwiseAbs().maxCoeff());
  }

  // Unweighted natural edges are the support of the weighted ones.
  std::size_t support_mismatch = 0;
  for (const auto& doc : setup.corpus.documents) {
    const Matrix w = graphs::build_natural_connection_graph(doc, setup.tfidf, true);
    const Matrix b = graphs::build_natural_connection_graph(doc, setup.tfidf, false);
    if (b != (w.array() > 0.0).cast<double>().matrix()) ++support_mismatch;
  }

  return {count_mismatch == 0 && delta_mismatch == 0 && eq_err <= 1e-12 && support_mismatch == 0,
          fmt("%.0f rows, %.0f count mismatches, %.0f delta mismatches", double(rows.size()), double(count_mismatch),
              double(delta_mismatch)) +
              fmt("; zero-weight equivalence max diff %.3g", eq_err)};
}

// --- 10 --------------------------------------------------------------------

Outcome k_sweep() {
  auto& o = overfit();
  const std::size_t max_k = 7;
  auto table = [&] {
    std::ostringstream out;
    trainer::write_sweep_table(out, trainer::sweep_k(o.model, o.setup.corpus, o.setup.resources(), max_k, false));
    return out.str();
  };
  const auto a = table();
  const bool deterministic = a == table();
  std::istringstream lines(a);
  std::string line;
  std::getline(lines, line);
  bool format = line == "k,r1,r2,rl,r1_recall";
  std::size_t rows = 0;
  double prev_recall = -1.0, last_recall = 0.0;
  bool monotone = true;
  while (std::getline(lines, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string field;
    std::vector<double> v;
    while (std::getline(fields, field, ',')) v.push_back(std::stod(field));
    if (v.size() != 5 || v[0] != double(rows)) format = false;
    if (v.size() == 5) {
      if (v[4] < prev_recall || v[4] > 100.0) monotone = false;
      prev_recall = last_recall = v[4];
    }
  }
  return {format && rows == max_k && deterministic && monotone,
          fmt("%.0f rows, recall at K=7 %.2f", double(rows), last_recall) + (deterministic ? ", deterministic" : ", NOT deterministic") +
              (monotone ? ", monotone and capped" : ", NOT monotone")};
}

}  // namespace

int main() {
  report(1, "gradient correctness", gradient_check);
  report(2, "zero-weight collapse", zero_weight_collapse);
  report(3, "graph invariants", graph_invariants);
  report(4, "ROUGE oracle equivalence", rouge_equivalence);
  report(5, "tri-gram blocking", trigram_blocking);
  report(6, "overfit", overfit_test);
  report(7, "greedy oracle", greedy_oracle);
  report(8, "determinism", determinism);
  report(9, "structural ablations", structural_ablations);
  report(10, "K sweep", k_sweep);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
