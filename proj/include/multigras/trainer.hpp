#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "multigras/corpus.hpp"
#include "multigras/graphs.hpp"
#include "multigras/model.hpp"
#include "multigras/rouge.hpp"

namespace multigras::trainer {

using ad::Index;

struct TrainingConfig {
  double learning_rate = 0.0005;
  std::size_t epochs = 10;
  std::size_t batch_size = 1;  // documents per optimizer step
  std::uint64_t seed = 1;
  std::size_t patience = 3;    // validation evaluations without R-1 improvement
  double clip_norm = 2.0;      // 0 disables clipping
  double target_loss = 0.0;    // stop once the epoch mean loss is below this; 0 disables
  std::size_t jobs = 1;
  std::filesystem::path checkpoint;   // empty: do not write
  std::filesystem::path metrics_log;  // CSV epoch,split,loss,r1,r2,rl; empty: no log

  void validate() const;
};

/// Parameter-free resources shared by every document.
struct Resources {
  const EmbeddingTable* embeddings = nullptr;
  const graphs::TfidfModel* tfidf = nullptr;
};

std::vector<model::DocumentInputs> prepare_corpus(const Corpus& corpus, const Resources& res,
                                                  const model::ModelConfig& config);

struct DocumentReport {
  std::string id;
  std::vector<std::size_t> selected;
  rouge::RougeTriple scores;
};

struct EvalReport {
  std::size_t k = 0;
  double r1 = 0.0;  // mean F1, fraction in [0, 1]
  double r2 = 0.0;
  double rl = 0.0;
  double r1_recall = 0.0;
  std::vector<DocumentReport> documents;
};

/// ROUGE F1 of the concatenated selected sentences vs each reference, averaged.
EvalReport evaluate_selections(const Corpus& corpus, const std::vector<std::vector<std::size_t>>& selections,
                               std::size_t k);

struct Prediction {
  std::vector<double> scores;
  std::vector<std::size_t> selected;
};

std::vector<Prediction> predict_corpus(const model::Model& model, const Corpus& corpus,
                                       const std::vector<model::DocumentInputs>& inputs, std::size_t k,
                                       bool blocking, std::size_t jobs = 1);

EvalReport evaluate(const model::Model& model, const Corpus& corpus, const Resources& res, std::size_t k,
                    bool blocking, std::size_t jobs = 1);

/// One report per K in [1, max_k].
std::vector<EvalReport> sweep_k(const model::Model& model, const Corpus& corpus, const Resources& res,
                                std::size_t max_k, bool blocking, std::size_t jobs = 1);

void write_sweep_table(std::ostream& out, const std::vector<EvalReport>& reports);

struct TrainResult {
  std::vector<double> epoch_losses;
  std::size_t epochs_run = 0;
  std::optional<double> best_valid_r1;
  std::filesystem::path checkpoint;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

/// Trains in place. Documents need oracle labels. With a validation corpus the best
/// validation R-1 parameters are restored at the end (and checkpointed).
TrainResult train(model::Model& model, const Corpus& train_corpus, const Corpus* valid_corpus,
                  const Resources& res, const TrainingConfig& config, const EpochCallback& on_epoch = {});

/// Closed-form scalar count for a configuration, computed from layer shapes.
std::size_t analytic_parameter_count(const model::ModelConfig& config, std::size_t emb_dim);

struct AblationVariant {
  std::string name;
  std::function<void(model::ModelConfig&)> apply;
};

/// The ablation rows of the original study, starting with the full model.
std::vector<AblationVariant> standard_ablations();

struct AblationRow {
  std::string name;
  model::ModelConfig config;
  std::size_t parameter_count = 0;
  std::size_t analytic_count = 0;
  long long delta = 0;  // relative to the first row
  std::optional<EvalReport> report;

  bool counts_match() const { return parameter_count == analytic_count; }
};

struct AblationOptions {
  bool train_models = true;
  std::size_t k = 3;
};

std::vector<AblationRow> run_ablation(const Corpus& train_corpus, const Corpus& eval_corpus, const Resources& res,
                                      const model::ModelConfig& base, const TrainingConfig& training,
                                      const std::vector<AblationVariant>& variants, const AblationOptions& options);

void write_ablation_table(std::ostream& out, const std::vector<AblationRow>& rows);

struct GradCheckSuiteOptions {
  std::uint64_t seed = 7;
  Index d = 16;
  double step = 1e-5;
  std::size_t max_coords_per_tensor = 0;  // 0: every coordinate
};

struct GradCheckSuiteResult {
  ad::GradCheckReport report;
  std::map<std::string, double> per_group;  // word / sentence / selector
  std::size_t parameter_count = 0;
  double seconds = 0.0;
};

/// Finite-difference check of the full model loss on a seeded 3-sentence toy document.
GradCheckSuiteResult run_grad_check_suite(const GradCheckSuiteOptions& options);

}  // namespace multigras::trainer
