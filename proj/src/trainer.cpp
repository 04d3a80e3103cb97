#include "multigras/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include "multigras/synthetic.hpp"

namespace multigras::trainer {

void TrainingConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("training: learning rate must be finite and >= 0");
  if (epochs < 1) throw ConfigError("training: epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("training: batch size must be >= 1");
  if (clip_norm < 0.0) throw ConfigError("training: clip norm must be >= 0");
}

std::vector<model::DocumentInputs> prepare_corpus(const Corpus& corpus, const Resources& res,
                                                  const model::ModelConfig& config) {
  if (res.embeddings == nullptr || res.tfidf == nullptr)
    throw ConfigError("prepare_corpus: embeddings and tf-idf model are required");
  std::vector<model::DocumentInputs> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus.documents) out.push_back(model::prepare_document(doc, *res.embeddings, *res.tfidf, config));
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

EvalReport evaluate_selections(const Corpus& corpus, const std::vector<std::vector<std::size_t>>& selections,
                               std::size_t k) {
  if (corpus.empty()) throw ValidationError("evaluate: empty corpus");
  if (selections.size() != corpus.size()) throw std::invalid_argument("evaluate: one selection per document required");
  EvalReport report;
  report.k = k;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& doc = corpus.documents[i];
    DocumentReport d{doc.id, selections[i], rouge::rouge_all(concat_sentences(doc, selections[i]), doc.reference_tokens())};
    report.r1 += d.scores.r1.f1;
    report.r2 += d.scores.r2.f1;
    report.rl += d.scores.rl.f1;
    report.r1_recall += d.scores.r1.recall;
    report.documents.push_back(std::move(d));
  }
  const auto n = static_cast<double>(corpus.size());
  report.r1 /= n;
  report.r2 /= n;
  report.rl /= n;
  report.r1_recall /= n;
  return report;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += jobs) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<Prediction> predict_corpus(const model::Model& model, const Corpus& corpus,
                                       const std::vector<model::DocumentInputs>& inputs, std::size_t k,
                                       bool blocking, std::size_t jobs) {
  std::vector<Prediction> out(inputs.size());
  parallel_for(inputs.size(), jobs, [&](std::size_t i) {
    out[i].scores = model::predict(model, inputs[i]);
    out[i].selected = model::select_summary(out[i].scores, corpus.documents[i], k, blocking);
  });
  return out;
}

EvalReport evaluate(const model::Model& model, const Corpus& corpus, const Resources& res, std::size_t k,
                    bool blocking, std::size_t jobs) {
  if (corpus.empty()) throw ValidationError("evaluate: empty corpus");
  const auto inputs = prepare_corpus(corpus, res, model.config());
  const auto predictions = predict_corpus(model, corpus, inputs, k, blocking, jobs);
  std::vector<std::vector<std::size_t>> selections;
  for (const auto& p : predictions) selections.push_back(p.selected);
  return evaluate_selections(corpus, selections, k);
}

std::vector<EvalReport> sweep_k(const model::Model& model, const Corpus& corpus, const Resources& res,
                                std::size_t max_k, bool blocking, std::size_t jobs) {
  if (corpus.empty()) throw ValidationError("sweep-k: empty corpus");
  if (max_k < 1) throw ConfigError("sweep-k: max K must be >= 1");
  const auto inputs = prepare_corpus(corpus, res, model.config());
  const auto predictions = predict_corpus(model, corpus, inputs, 1, blocking, jobs);
  std::vector<EvalReport> reports;
  for (std::size_t k = 1; k <= max_k; ++k) {
    std::vector<std::vector<std::size_t>> selections;
    for (std::size_t i = 0; i < corpus.size(); ++i)
      selections.push_back(model::select_summary(predictions[i].scores, corpus.documents[i], k, blocking));
    reports.push_back(evaluate_selections(corpus, selections, k));
  }
  return reports;
}

void write_sweep_table(std::ostream& out, const std::vector<EvalReport>& reports) {
  out << "k,r1,r2,rl,r1_recall\n";
  char line[128];
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "%zu,%.4f,%.4f,%.4f,%.4f\n", r.k, 100.0 * r.r1, 100.0 * r.r2, 100.0 * r.rl,
                  100.0 * r.r1_recall);
    out << line;
  }
}

// ---------------------------------------------------------------------------
// Training

namespace {

using Snapshot = std::map<std::string, Matrix>;

Snapshot snapshot(const ad::ParameterSet& params) {
  Snapshot s;
  for (const auto& [name, t] : params) s.emplace(name, t.value());
  return s;
}

void restore(ad::ParameterSet& params, const Snapshot& s) {
  for (auto& [name, t] : params) t.value() = s.at(name);
}

void log_row(std::ofstream* log, std::size_t epoch, const char* split, double loss, const EvalReport* r) {
  if (log == nullptr) return;
  char line[160];
  if (r != nullptr) {
    std::snprintf(line, sizeof(line), "%zu,%s,%.10g,%.6f,%.6f,%.6f\n", epoch, split, loss, r->r1, r->r2, r->rl);
  } else {
    std::snprintf(line, sizeof(line), "%zu,%s,%.10g,,,\n", epoch, split, loss);
  }
  *log << line;
  log->flush();
}

}  // namespace

TrainResult train(model::Model& model, const Corpus& train_corpus, const Corpus* valid_corpus,
                  const Resources& res, const TrainingConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_corpus.empty()) throw ValidationError("train: empty training corpus");
  for (const auto& doc : train_corpus.documents) {
    if (!doc.oracle_labels)
      throw ValidationError("train: document '" + doc.id + "' has no oracle labels; run the `oracle` command first");
  }
  const auto& mcfg = model.config();
  const auto inputs = prepare_corpus(train_corpus, res, mcfg);
  std::vector<model::DocumentInputs> valid_inputs;
  if (valid_corpus != nullptr && !valid_corpus->empty()) valid_inputs = prepare_corpus(*valid_corpus, res, mcfg);

  std::ofstream log_file;
  std::ofstream* log = nullptr;
  if (!config.metrics_log.empty()) {
    log_file.open(config.metrics_log);
    if (!log_file) throw std::runtime_error("cannot write metrics log: " + config.metrics_log.string());
    log_file << "epoch,split,loss,r1,r2,rl\n";
    log = &log_file;
  }

  auto& params = model.parameters();
  ad::AdamState adam;
  adam.learning_rate = config.learning_rate;
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  Snapshot best;
  std::size_t stale = 0;
  params.zero_grad();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t in_batch = 0;
    auto apply_update = [&] {
      if (in_batch == 0) return;
      if (in_batch > 1)
        for (auto& [name, t] : params) t.grad() /= static_cast<double>(in_batch);
      if (config.clip_norm > 0.0) ad::clip_grad_norm(params, config.clip_norm);
      ad::adam_step(params, adam);
      in_batch = 0;
    };
    for (auto idx : order) {
      const auto& doc = inputs[idx];
      ad::Tape tape;
      auto out = model::forward(tape, model, doc);
      auto loss = model::bce_loss(out.scores, doc.labels);
      epoch_loss += loss.scalar();
      ad::backward(loss, params);
      if (++in_batch == config.batch_size) apply_update();
    }
    apply_update();
    epoch_loss /= static_cast<double>(inputs.size());
    result.epoch_losses.push_back(epoch_loss);
    result.epochs_run = epoch;
    log_row(log, epoch, "train", epoch_loss, nullptr);
    if (on_epoch) on_epoch(epoch, epoch_loss);

    if (!valid_inputs.empty()) {
      double valid_loss = 0.0;
      std::size_t labelled = 0;
      for (const auto& doc : valid_inputs) {
        if (doc.labels.empty()) continue;
        ad::Tape tape(false);
        valid_loss += model::bce_loss(model::forward(tape, model, doc).scores, doc.labels).scalar();
        ++labelled;
      }
      if (labelled > 0) valid_loss /= static_cast<double>(labelled);
      const auto preds = predict_corpus(model, *valid_corpus, valid_inputs, mcfg.top_k, mcfg.trigram_blocking, config.jobs);
      std::vector<std::vector<std::size_t>> selections;
      for (const auto& p : preds) selections.push_back(p.selected);
      const auto report = evaluate_selections(*valid_corpus, selections, mcfg.top_k);
      log_row(log, epoch, "valid", valid_loss, &report);
      if (!result.best_valid_r1 || report.r1 > *result.best_valid_r1) {
        result.best_valid_r1 = report.r1;
        best = snapshot(params);
        stale = 0;
      } else if (++stale >= config.patience) {
        break;
      }
    }
    if (config.target_loss > 0.0 && epoch_loss < config.target_loss) break;
  }

  if (!best.empty()) restore(params, best);
  params.zero_grad();
  if (!config.checkpoint.empty()) {
    model.save(config.checkpoint);
    result.checkpoint = config.checkpoint;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Ablation

namespace {

std::size_t bilstm_count(std::size_t input, std::size_t d, std::size_t layers) {
  const std::size_t h = d / 2;
  std::size_t n = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = l == 0 ? input : d;
    n += 2 * (in * 4 * h + h * 4 * h + 4 * h);
  }
  return n;
}

std::size_t multi_gcn_count(std::size_t relations, std::size_t d, std::size_t layers) {
  const std::size_t branch = layers * (2 * d * d + d);
  return relations * branch + relations * d * d + d;
}

}  // namespace

std::size_t analytic_parameter_count(const model::ModelConfig& c, std::size_t emb_dim) {
  const auto d = static_cast<std::size_t>(c.d);
  std::size_t n = bilstm_count(emb_dim, d, c.lstm_layers) + bilstm_count(d, d, c.lstm_layers);
  const std::size_t word_rel = static_cast<std::size_t>(c.syntactic) + static_cast<std::size_t>(c.word_semantic);
  const std::size_t sent_rel = static_cast<std::size_t>(c.sentence_semantic) + static_cast<std::size_t>(c.natural);
  if (c.word_gcn) n += multi_gcn_count(word_rel, d, c.skip_gcn_layers);
  if (c.sentence_gcn) n += multi_gcn_count(sent_rel, d, c.skip_gcn_layers);
  n += d * d + d;                       // reading
  if (c.contextual) n += 3 * d * d + d;  // post-reading
  n += d + 1;                           // score
  return n;
}

std::vector<AblationVariant> standard_ablations() {
  using C = model::ModelConfig;
  return {
      {"Multi-GraS", [](C&) {}},
      {"- trigram blocking", [](C& c) { c.trigram_blocking = false; }},
      {"- contextual information", [](C& c) { c.contextual = false; }},
      {"- outer skip", [](C& c) { c.sentence_outer_skip = false; }},
      {"- inner skip", [](C& c) { c.sentence_inner_skip = false; }},
      {"- semantic relation", [](C& c) { c.sentence_semantic = false; }},
      {"- natural connection relation", [](C& c) { c.natural = false; }},
      {"- weights for natural connection", [](C& c) { c.natural_weighted = false; }},
      {"Multi-GraS_word", [](C& c) { c.sentence_gcn = false; }},
      {"Multi-GraS_word - outer skip", [](C& c) {
         c.sentence_gcn = false;
         c.word_outer_skip = false;
       }},
      {"Multi-GraS_word - inner skip", [](C& c) {
         c.sentence_gcn = false;
         c.word_inner_skip = false;
       }},
      {"Multi-GraS_word - semantic relation", [](C& c) {
         c.sentence_gcn = false;
         c.word_semantic = false;
       }},
      {"Multi-GraS_word - syntactic relation", [](C& c) {
         c.sentence_gcn = false;
         c.syntactic = false;
       }},
      {"LSTM", [](C& c) {
         c.sentence_gcn = false;
         c.word_gcn = false;
       }},
      {"LSTM (w/o tri-gram blocking)", [](C& c) {
         c.sentence_gcn = false;
         c.word_gcn = false;
         c.trigram_blocking = false;
       }},
  };
}

std::vector<AblationRow> run_ablation(const Corpus& train_corpus, const Corpus& eval_corpus, const Resources& res,
                                      const model::ModelConfig& base, const TrainingConfig& training,
                                      const std::vector<AblationVariant>& variants, const AblationOptions& options) {
  if (res.embeddings == nullptr) throw ConfigError("ablate: embeddings are required");
  const auto emb_dim = static_cast<std::size_t>(res.embeddings->dim());
  std::vector<AblationRow> rows;
  for (const auto& v : variants) {
    AblationRow row;
    row.name = v.name;
    row.config = base;
    v.apply(row.config);
    row.config.validate();
    model::Model m(row.config, static_cast<Index>(emb_dim), training.seed);
    row.parameter_count = m.parameters().scalar_count();
    row.analytic_count = analytic_parameter_count(row.config, emb_dim);
    if (options.train_models) {
      auto cfg = training;
      cfg.checkpoint.clear();
      cfg.metrics_log.clear();
      train(m, train_corpus, nullptr, res, cfg);
      row.report = evaluate(m, eval_corpus, res, options.k, row.config.trigram_blocking, training.jobs);
    }
    row.delta = rows.empty() ? 0
                             : static_cast<long long>(row.parameter_count) -
                                   static_cast<long long>(rows.front().parameter_count);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_ablation_table(std::ostream& out, const std::vector<AblationRow>& rows) {
  char line[256];
  std::snprintf(line, sizeof(line), "%-40s %10s %10s %10s %6s %8s %8s %8s\n", "variant", "params", "delta",
                "analytic", "match", "R-1", "R-2", "R-L");
  out << line;
  for (const auto& r : rows) {
    if (r.report) {
      std::snprintf(line, sizeof(line), "%-40s %10zu %10lld %10zu %6s %8.2f %8.2f %8.2f\n", r.name.c_str(),
                    r.parameter_count, r.delta, r.analytic_count, r.counts_match() ? "yes" : "NO",
                    100.0 * r.report->r1, 100.0 * r.report->r2, 100.0 * r.report->rl);
    } else {
      std::snprintf(line, sizeof(line), "%-40s %10zu %10lld %10zu %6s %8s %8s %8s\n", r.name.c_str(),
                    r.parameter_count, r.delta, r.analytic_count, r.counts_match() ? "yes" : "NO", "-", "-", "-");
    }
    out << line;
  }
}

// ---------------------------------------------------------------------------
// Gradient check suite

GradCheckSuiteResult run_grad_check_suite(const GradCheckSuiteOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  auto sentence = [](std::string_view text) {
    Sentence s;
    for (auto& w : tokenize(text)) s.tokens.push_back(Token{std::move(w), 0});
    s.dep_edges = linear_chain_edges(s.tokens.size());
    return s;
  };
  Corpus corpus;
  Document doc;
  doc.id = "gradcheck";
  doc.sentences = {sentence("the city council met on monday"), sentence("city officials approved the budget"),
                   sentence("the budget funds new parks")};
  doc.reference_summary = {tokenize("city council approved new budget")};
  doc.oracle_labels = std::vector<int>{1, 0, 1};
  corpus.documents.push_back(doc);
  for (std::string_view other : {"rain fell over the hills", "a quiet harbor town slept"}) {
    Document filler;
    filler.id = std::string(other);
    filler.sentences = {sentence(other)};
    corpus.documents.push_back(std::move(filler));
  }
  auto vocab = build_vocabulary(corpus, 1000);
  assign_vocab_ids(corpus, vocab);
  const auto emb = synthetic::random_embeddings(vocab, options.d, options.seed);
  const auto tfidf = graphs::fit_tfidf(corpus, 1);

  model::ModelConfig cfg;
  cfg.d = options.d;
  model::Model m(cfg, options.d, options.seed);
  const auto inputs = model::prepare_document(corpus.documents.front(), emb, tfidf, cfg);

  GradCheckSuiteResult result;
  result.parameter_count = m.parameters().scalar_count();
  ad::GradCheckOptions gc;
  gc.step = options.step;
  gc.max_coords_per_tensor = options.max_coords_per_tensor;
  gc.seed = options.seed;
  result.report = ad::grad_check(
      [&](ad::Tape& tape) { return model::bce_loss(model::forward(tape, m, inputs).scores, inputs.labels); },
      m.parameters(), gc);
  for (const auto& [name, err] : result.report.per_tensor) {
    const auto group = name.substr(0, name.find('.'));
    result.per_group[group] = std::max(result.per_group[group], err);
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace multigras::trainer
