// multigras: command-line front end for the extractive summarizer pipeline.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "multigras/corpus.hpp"
#include "multigras/graphs.hpp"
#include "multigras/model.hpp"
#include "multigras/synthetic.hpp"
#include "multigras/trainer.hpp"

namespace fs = std::filesystem;
using namespace multigras;

namespace {

constexpr int kUsageError = 2;

// Files written by `prepare` and read by everything downstream.
struct DataDir {
  fs::path root;
  fs::path corpus() const { return root / "corpus.jsonl"; }
  fs::path vocab() const { return root / "vocab.txt"; }
  fs::path tfidf() const { return root / "tfidf.json"; }
  fs::path embeddings() const { return root / "embeddings.txt"; }
  fs::path meta() const { return root / "meta.json"; }
};

struct LoadedResources {
  Vocabulary vocab;
  EmbeddingTable embeddings;
  graphs::TfidfModel tfidf;

  trainer::Resources view() const { return {&embeddings, &tfidf}; }
};

LoadedResources load_resources(const DataDir& dir) {
  std::ifstream meta_in(dir.meta());
  if (!meta_in) throw std::runtime_error("missing " + dir.meta().string() + "; run `prepare` first");
  const auto meta = nlohmann::json::parse(meta_in);
  LoadedResources res;
  res.vocab = Vocabulary::load(dir.vocab(), meta.at("vocab_size").get<std::size_t>());
  res.embeddings = load_embeddings(dir.embeddings(), res.vocab, meta.at("emb_dim").get<Eigen::Index>());
  res.tfidf = graphs::TfidfModel::load(dir.tfidf());
  return res;
}

Corpus load_for(const fs::path& path, const Vocabulary& vocab) {
  auto corpus = load_corpus(path);
  if (corpus.empty()) throw ValidationError(path.string() + ": corpus is empty");
  assign_vocab_ids(corpus, vocab);
  return corpus;
}

// Model and training flags shared by `train` and `ablate`.
struct ModelFlags {
  model::ModelConfig config;
  bool no_word_gcn = false, no_sentence_gcn = false;
  bool no_syntactic = false, no_word_semantic = false, no_sentence_semantic = false, no_natural = false;
  bool unweighted_natural = false, no_contextual = false, no_blocking = false;
  bool no_word_inner = false, no_word_outer = false, no_sentence_inner = false, no_sentence_outer = false;

  void attach(CLI::App& cmd) {
    cmd.add_option("--d", config.d, "Hidden width d")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--gcn-layers", config.skip_gcn_layers, "Skip-GCN layers per relation")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--lstm-layers", config.lstm_layers, "Bi-LSTM layers per block")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--max-sentences", config.max_sentences, "Truncate documents to this many sentences")
        ->capture_default_str();
    cmd.add_option("--max-tokens", config.max_tokens, "Truncate sentences to this many tokens")->capture_default_str();
    cmd.add_option("--semantic-threshold", config.semantic_threshold, "Zero semantic edges below this weight")
        ->capture_default_str();
    cmd.add_option("--forget-bias", config.forget_bias, "Initial LSTM forget-gate bias")->capture_default_str();
    cmd.add_flag("--detach-semantic", config.detach_semantic_graph,
                 "Treat the semantic word graph as a constant in backprop");
    cmd.add_flag("--no-word-gcn", no_word_gcn, "Drop the word-level Multi-GCN");
    cmd.add_flag("--no-sentence-gcn", no_sentence_gcn, "Drop the sentence-level Multi-GCN");
    cmd.add_flag("--no-syntactic", no_syntactic, "Drop the syntactic word relation");
    cmd.add_flag("--no-word-semantic", no_word_semantic, "Drop the semantic word relation");
    cmd.add_flag("--no-sentence-semantic", no_sentence_semantic, "Drop the semantic sentence relation");
    cmd.add_flag("--no-natural", no_natural, "Drop the natural connection relation");
    cmd.add_flag("--unweighted-natural", unweighted_natural, "Binary natural connection edges");
    cmd.add_flag("--no-contextual", no_contextual, "Reading stage only in the selector");
    cmd.add_flag("--no-blocking", no_blocking, "Disable trigram blocking");
    cmd.add_flag("--no-word-inner-skip", no_word_inner, "Drop the inner skip in the word block");
    cmd.add_flag("--no-word-outer-skip", no_word_outer, "Drop the outer skip in the word block");
    cmd.add_flag("--no-sentence-inner-skip", no_sentence_inner, "Drop the inner skip in the sentence block");
    cmd.add_flag("--no-sentence-outer-skip", no_sentence_outer, "Drop the outer skip in the sentence block");
  }

  model::ModelConfig resolve() const {
    auto c = config;
    c.word_gcn = !no_word_gcn;
    c.sentence_gcn = !no_sentence_gcn;
    c.syntactic = !no_syntactic;
    c.word_semantic = !no_word_semantic;
    c.sentence_semantic = !no_sentence_semantic;
    c.natural = !no_natural;
    c.natural_weighted = !unweighted_natural;
    c.contextual = !no_contextual;
    c.trigram_blocking = !no_blocking;
    c.word_inner_skip = !no_word_inner;
    c.word_outer_skip = !no_word_outer;
    c.sentence_inner_skip = !no_sentence_inner;
    c.sentence_outer_skip = !no_sentence_outer;
    return c;
  }
};

void attach_training(CLI::App& cmd, trainer::TrainingConfig& t) {
  cmd.add_option("--lr", t.learning_rate, "Adam learning rate")->capture_default_str();
  cmd.add_option("--epochs", t.epochs, "Maximum epochs")->capture_default_str()->check(CLI::PositiveNumber);
  cmd.add_option("--batch-size", t.batch_size, "Documents per optimizer step")
      ->capture_default_str()->check(CLI::PositiveNumber);
  cmd.add_option("--patience", t.patience, "Validation rounds without R-1 gain before stopping")
      ->capture_default_str();
  cmd.add_option("--clip-norm", t.clip_norm, "Global gradient norm cap, 0 disables")->capture_default_str();
  cmd.add_option("--target-loss", t.target_loss, "Stop once mean epoch loss drops below this, 0 disables")
      ->capture_default_str();
}

void print_report(const trainer::EvalReport& r) {
  std::printf("K=%zu  R-1 %.2f  R-2 %.2f  R-L %.2f  (R-1 recall %.2f, %zu documents)\n", r.k, 100.0 * r.r1,
              100.0 * r.r2, 100.0 * r.rl, 100.0 * r.r1_recall, r.documents.size());
}

nlohmann::json report_json(const trainer::EvalReport& r) {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : r.documents) {
    docs.push_back({{"id", d.id},
                    {"selected", d.selected},
                    {"r1", d.scores.r1.f1},
                    {"r2", d.scores.r2.f1},
                    {"rl", d.scores.rl.f1}});
  }
  return {{"k", r.k}, {"r1", r.r1}, {"r2", r.r2}, {"rl", r.rl}, {"r1_recall", r.r1_recall}, {"documents", docs}};
}

// Writes to `path`, or stdout when empty.
template <typename Fn>
void with_output(const fs::path& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
}

// Expands `--config FILE` into `--key=value` arguments for every key the command
// line does not already set, so flags win over the file and unknown keys are
// rejected like unknown flags.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  fs::path config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty()) return args;
  std::ifstream in(config);
  if (!in) throw CLI::FileError::Missing(config.string());
  auto given = [&](const std::string& key) {
    const auto flag = "--" + key;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  CLI::ConfigINI parser;
  for (const auto& item : parser.from_config(in)) {
    if (!item.parents.empty()) throw CLI::ConversionError(config.string() + ": sections are not supported");
    if (item.name.empty() || given(item.name)) continue;
    std::string value;
    for (const auto& v : item.inputs) value += (value.empty() ? "" : " ") + v;
    args.push_back("--" + item.name + "=" + value);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiplex-graph extractive summarizer"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  fs::path data_dir = "data/run";

  auto common = [&](CLI::App& cmd) {
    cmd.add_option("--config", "Flat key=value file mirroring the flags; flags take precedence");
    cmd.add_option("--seed", seed, "Seed for every random choice")->capture_default_str();
    cmd.add_option("--jobs", jobs, "Worker threads for evaluation")->capture_default_str()->check(CLI::PositiveNumber);
  };
  auto data_flag = [&](CLI::App& cmd) {
    cmd.add_option("--data", data_dir, "Directory written by `prepare`")->capture_default_str();
  };

  // prepare -------------------------------------------------------------------
  auto* prepare = app.add_subcommand("prepare", "Validate raw JSONL and build vocabulary, tf-idf and embeddings");
  fs::path prep_input, prep_embeddings, prep_stopwords;
  std::size_t prep_vocab = 50000, prep_min_df = 100;
  Eigen::Index prep_dim = 300;
  common(*prepare);
  prepare->add_option("--input", prep_input, "Raw corpus JSONL")->required()->check(CLI::ExistingFile);
  prepare->add_option("--out", data_dir, "Output directory")->capture_default_str();
  prepare->add_option("--vocab-size", prep_vocab, "Vocabulary cap including <unk>")->capture_default_str();
  prepare->add_option("--min-df", prep_min_df, "Minimum document frequency for keywords")->capture_default_str();
  prepare->add_option("--emb-dim", prep_dim, "Embedding width")->capture_default_str()->check(CLI::PositiveNumber);
  prepare->add_option("--embeddings", prep_embeddings,
                      "Pretrained text embeddings (word v1 .. vn); random vectors when absent")
      ->check(CLI::ExistingFile);
  prepare->add_option("--stopwords", prep_stopwords, "Stopword list, one per line; built-in list when absent")
      ->check(CLI::ExistingFile);

  // oracle --------------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "Attach greedy ROUGE oracle labels to a corpus");
  fs::path oracle_input, oracle_output;
  std::size_t max_oracle = 3;
  common(*oracle);
  oracle->add_option("--input", oracle_input, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  oracle->add_option("--output", oracle_output, "Labeled corpus JSONL (default: overwrite input)");
  oracle->add_option("--max-oracle", max_oracle, "Maximum sentences picked per document")
      ->capture_default_str()->check(CLI::PositiveNumber);

  // train ---------------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Train a model on a labeled corpus");
  ModelFlags train_model;
  trainer::TrainingConfig train_cfg;
  fs::path train_input, valid_input;
  common(*train);
  data_flag(*train);
  train->add_option("--train", train_input, "Labeled training corpus JSONL")->required()->check(CLI::ExistingFile);
  train->add_option("--valid", valid_input, "Labeled validation corpus JSONL")->check(CLI::ExistingFile);
  train->add_option("--checkpoint", train_cfg.checkpoint, "Where to write the trained checkpoint")->required();
  train->add_option("--metrics-log", train_cfg.metrics_log, "CSV metrics log");
  train_model.attach(*train);
  attach_training(*train, train_cfg);

  // evaluate ------------------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint with ROUGE against reference summaries");
  fs::path eval_corpus, eval_checkpoint, eval_output;
  std::optional<std::size_t> eval_k;
  bool eval_no_blocking = false;
  common(*evaluate);
  data_flag(*evaluate);
  evaluate->add_option("--corpus", eval_corpus, "Corpus JSONL with reference summaries")
      ->required()->check(CLI::ExistingFile);
  evaluate->add_option("--checkpoint", eval_checkpoint, "Trained checkpoint")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--k", eval_k, "Sentences per summary (default: the checkpoint's top_k)");
  evaluate->add_flag("--no-blocking", eval_no_blocking, "Disable trigram blocking");
  evaluate->add_option("--report", eval_output, "Write the per-document report as JSON");

  // summarize -----------------------------------------------------------------
  auto* summarize = app.add_subcommand("summarize", "Write extractive summaries as JSONL");
  fs::path sum_input, sum_checkpoint, sum_output;
  std::optional<std::size_t> sum_k;
  bool sum_no_blocking = false;
  common(*summarize);
  data_flag(*summarize);
  summarize->add_option("--input", sum_input, "One document or a corpus, JSONL")->required()->check(CLI::ExistingFile);
  summarize->add_option("--checkpoint", sum_checkpoint, "Trained checkpoint")->required()->check(CLI::ExistingFile);
  summarize->add_option("--output", sum_output, "Summary JSONL (default: stdout)");
  summarize->add_option("--k", sum_k, "Sentences per summary (default: the checkpoint's top_k)");
  summarize->add_flag("--no-blocking", sum_no_blocking, "Disable trigram blocking");

  // grad-check ----------------------------------------------------------------
  auto* grad_check = app.add_subcommand("grad-check", "Finite-difference check of every parameter gradient");
  trainer::GradCheckSuiteOptions gc;
  double gc_tolerance = 1e-3;
  grad_check->add_option("--config", "Flat key=value file mirroring the flags; flags take precedence");
  grad_check->add_option("--seed", gc.seed, "Seed for the toy document and initial weights")->capture_default_str();
  grad_check->add_option("--d", gc.d, "Hidden width")->capture_default_str()->check(CLI::PositiveNumber);
  grad_check->add_option("--step", gc.step, "Central-difference step")->capture_default_str();
  grad_check->add_option("--max-coords", gc.max_coords_per_tensor,
                         "Coordinates sampled per tensor, 0 checks all")->capture_default_str();
  grad_check->add_option("--tolerance", gc_tolerance, "Pass threshold on max relative error")->capture_default_str();

  // sweep-k -------------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep-k", "R-1 as a function of summary length K");
  fs::path sweep_corpus, sweep_checkpoint, sweep_output;
  std::size_t sweep_max_k = 7;
  bool sweep_no_blocking = false;
  common(*sweep);
  data_flag(*sweep);
  sweep->add_option("--corpus", sweep_corpus, "Corpus JSONL with reference summaries")
      ->required()->check(CLI::ExistingFile);
  sweep->add_option("--checkpoint", sweep_checkpoint, "Trained checkpoint")->required()->check(CLI::ExistingFile);
  sweep->add_option("--max-k", sweep_max_k, "Largest K")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_flag("--no-blocking", sweep_no_blocking, "Disable trigram blocking");
  sweep->add_option("--output", sweep_output, "CSV table (default: stdout)");

  // ablate --------------------------------------------------------------------
  auto* ablate = app.add_subcommand("ablate", "Ablation table: parameter counts and, optionally, ROUGE per variant");
  ModelFlags ablate_model;
  trainer::TrainingConfig ablate_cfg;
  fs::path ablate_train, ablate_eval, ablate_output;
  bool ablate_no_train = false;
  std::size_t ablate_k = 3;
  common(*ablate);
  data_flag(*ablate);
  ablate->add_option("--train", ablate_train, "Labeled training corpus JSONL")->check(CLI::ExistingFile);
  ablate->add_option("--eval", ablate_eval, "Evaluation corpus (default: the training corpus)")
      ->check(CLI::ExistingFile);
  ablate->add_option("--output", ablate_output, "Table output (default: stdout)");
  ablate->add_option("--k", ablate_k, "Sentences per summary")->capture_default_str()->check(CLI::PositiveNumber);
  ablate->add_flag("--no-train", ablate_no_train, "Only report structure and parameter counts");
  ablate_model.attach(*ablate);
  attach_training(*ablate, ablate_cfg);

  try {
    auto args = expand_config(argc, argv);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    const DataDir dir{data_dir};

    if (prepare->parsed()) {
      if (prep_vocab < 2) throw ConfigError("--vocab-size must be >= 2");
      auto corpus = load_corpus(prep_input);
      if (corpus.empty()) throw ValidationError(prep_input.string() + ": corpus is empty");
      const auto stop = prep_stopwords.empty() ? graphs::default_stopwords() : graphs::load_stopwords(prep_stopwords);
      const auto vocab = build_vocabulary(corpus, prep_vocab);
      assign_vocab_ids(corpus, vocab);
      const auto tfidf = graphs::fit_tfidf(corpus, prep_min_df, stop);
      const auto emb = prep_embeddings.empty() ? synthetic::random_embeddings(vocab, prep_dim, seed)
                                               : load_embeddings(prep_embeddings, vocab, prep_dim);
      fs::create_directories(dir.root);
      save_corpus(dir.corpus(), corpus);
      vocab.save(dir.vocab());
      tfidf.save(dir.tfidf());
      save_embeddings(dir.embeddings(), vocab, emb);
      std::ofstream(dir.meta()) << nlohmann::json{{"vocab_size", vocab.size()},
                                                  {"emb_dim", prep_dim},
                                                  {"documents", corpus.size()},
                                                  {"keywords", tfidf.keywords().size()},
                                                  {"min_df", prep_min_df},
                                                  {"seed", seed}}
                                         .dump(2)
                                << '\n';
      std::printf("prepared %zu documents: %zu vocabulary entries, %zu keywords -> %s\n", corpus.size(), vocab.size(),
                  tfidf.keywords().size(), dir.root.string().c_str());
      return 0;
    }

    if (oracle->parsed()) {
      auto corpus = load_corpus(oracle_input);
      if (corpus.empty()) throw ValidationError(oracle_input.string() + ": corpus is empty");
      std::size_t picked = 0;
      for (auto& doc : corpus.documents) {
        doc.oracle_labels = extract_oracle_labels(doc, max_oracle);
        for (int l : *doc.oracle_labels) picked += static_cast<std::size_t>(l);
      }
      const auto out = oracle_output.empty() ? oracle_input : oracle_output;
      save_corpus(out, corpus);
      std::printf("labeled %zu documents (%.2f oracle sentences per document) -> %s\n", corpus.size(),
                  static_cast<double>(picked) / static_cast<double>(corpus.size()), out.string().c_str());
      return 0;
    }

    if (grad_check->parsed()) {
      const auto r = trainer::run_grad_check_suite(gc);
      for (const auto& [group, err] : r.per_group) std::printf("  %-10s max relative error %.3e\n", group.c_str(), err);
      std::printf("max relative error %.3e over %zu coordinates (%zu parameters, %zu skipped at kinks, %.1f s)\n",
                  r.report.max_relative_error, r.report.coordinates_checked, r.parameter_count,
                  r.report.coordinates_at_kinks, r.seconds);
      if (!r.report.worst_tensor.empty())
        std::printf("worst: %s[%td] analytic %.6e numeric %.6e\n", r.report.worst_tensor.c_str(),
                    r.report.worst_index, r.report.worst_analytic, r.report.worst_numeric);
      const bool ok = r.report.max_relative_error < gc_tolerance;
      std::printf("%s (tolerance %.1e)\n", ok ? "PASS" : "FAIL", gc_tolerance);
      return ok ? 0 : 1;
    }

    const auto res = load_resources(dir);

    if (train->parsed()) {
      const auto cfg = train_model.resolve();
      train_cfg.seed = seed;
      train_cfg.jobs = jobs;
      const auto train_corpus = load_for(train_input, res.vocab);
      std::optional<Corpus> valid;
      if (!valid_input.empty()) valid = load_for(valid_input, res.vocab);
      model::Model m(cfg, res.embeddings.dim(), seed);
      const auto result = trainer::train(m, train_corpus, valid ? &*valid : nullptr, res.view(), train_cfg,
                                         [](std::size_t epoch, double loss) {
                                           std::printf("epoch %zu  loss %.6f\n", epoch, loss);
                                           std::fflush(stdout);
                                         });
      if (result.best_valid_r1) std::printf("best validation R-1 %.2f\n", 100.0 * *result.best_valid_r1);
      std::printf("trained %zu epochs -> %s\n", result.epochs_run, train_cfg.checkpoint.string().c_str());
      return 0;
    }

    if (evaluate->parsed()) {
      const auto m = model::Model::load(eval_checkpoint);
      const auto corpus = load_for(eval_corpus, res.vocab);
      const bool blocking = !eval_no_blocking && m.config().trigram_blocking;
      const auto report = trainer::evaluate(m, corpus, res.view(), eval_k.value_or(m.config().top_k), blocking, jobs);
      print_report(report);
      if (!eval_output.empty()) with_output(eval_output, [&](std::ostream& o) { o << report_json(report).dump(2) << '\n'; });
      return 0;
    }

    if (summarize->parsed()) {
      const auto m = model::Model::load(sum_checkpoint);
      const auto corpus = load_for(sum_input, res.vocab);
      const bool blocking = !sum_no_blocking && m.config().trigram_blocking;
      const auto inputs = trainer::prepare_corpus(corpus, res.view(), m.config());
      const auto preds = trainer::predict_corpus(m, corpus, inputs, sum_k.value_or(m.config().top_k), blocking, jobs);
      with_output(sum_output, [&](std::ostream& o) {
        for (std::size_t i = 0; i < corpus.size(); ++i) {
          const auto& doc = corpus.documents[i];
          nlohmann::json summary = nlohmann::json::array();
          for (auto s : preds[i].selected) {
            std::string text;
            for (const auto& w : doc.sentences[s].surfaces()) text += (text.empty() ? "" : " ") + w;
            summary.push_back(text);
          }
          o << nlohmann::json{{"id", doc.id}, {"selected", preds[i].selected}, {"summary", summary},
                              {"scores", preds[i].scores}}
                   .dump()
            << '\n';
        }
      });
      return 0;
    }

    if (sweep->parsed()) {
      const auto m = model::Model::load(sweep_checkpoint);
      const auto corpus = load_for(sweep_corpus, res.vocab);
      const bool blocking = !sweep_no_blocking && m.config().trigram_blocking;
      const auto reports = trainer::sweep_k(m, corpus, res.view(), sweep_max_k, blocking, jobs);
      with_output(sweep_output, [&](std::ostream& o) { trainer::write_sweep_table(o, reports); });
      return 0;
    }

    if (ablate->parsed()) {
      const auto base = ablate_model.resolve();
      ablate_cfg.seed = seed;
      ablate_cfg.jobs = jobs;
      if (!ablate_no_train && ablate_train.empty()) throw ConfigError("ablate: --train is required unless --no-train");
      Corpus train_corpus, eval_corpus;
      if (!ablate_train.empty()) {
        train_corpus = load_for(ablate_train, res.vocab);
        eval_corpus = ablate_eval.empty() ? train_corpus : load_for(ablate_eval, res.vocab);
      }
      trainer::AblationOptions opts;
      opts.train_models = !ablate_no_train;
      opts.k = ablate_k;
      const auto rows = trainer::run_ablation(train_corpus, eval_corpus, res.view(), base, ablate_cfg,
                                              trainer::standard_ablations(), opts);
      with_output(ablate_output, [&](std::ostream& o) { trainer::write_ablation_table(o, rows); });
      for (const auto& row : rows) {
        if (!row.counts_match()) {
          std::fprintf(stderr, "error: parameter count mismatch for '%s' (%zu vs analytic %zu)\n", row.name.c_str(),
                       row.parameter_count, row.analytic_count);
          return 1;
        }
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
