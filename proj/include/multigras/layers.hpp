#pragma once

#include <array>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "multigras/autodiff.hpp"

namespace multigras::layers {

using ad::Index;
using ad::Tape;
using ad::Tensor;
using ad::Var;

/// Weight init: uniform(-1/sqrt(d), 1/sqrt(d)) for weights, zeros for biases.
class Initializer {
 public:
  Initializer(std::uint64_t seed, Index width);

  Matrix weight(Index rows, Index cols);
  static Matrix bias(Index cols, double fill = 0.0) { return Matrix::Constant(1, cols, fill); }

 private:
  std::mt19937_64 rng_;
  double bound_;
};

// Parameter views below point into an ad::ParameterSet and stay valid while it lives.

struct SkipGcnLayerParams {
  const Tensor* gcn_weight = nullptr;  // d x d, inside the graph convolution
  const Tensor* weight = nullptr;      // d x d, projection after the inner skip
  const Tensor* bias = nullptr;        // 1 x d
};

struct SkipGcnParams {
  std::vector<SkipGcnLayerParams> layers;
};

struct MultiGcnParams {
  std::vector<std::string> relations;
  std::vector<SkipGcnParams> branches;  // parallel to `relations`
  const Tensor* fusion_weight = nullptr;  // |R|d x d
  const Tensor* fusion_bias = nullptr;    // 1 x d
};

struct LstmDirectionParams {
  const Tensor* w_ih = nullptr;  // in x 4h, gate order i, f, g, o
  const Tensor* w_hh = nullptr;  // h x 4h
  const Tensor* bias = nullptr;  // 1 x 4h
};

struct BiLstmParams {
  Index hidden = 0;  // per direction
  std::vector<std::array<LstmDirectionParams, 2>> layers;  // [forward, backward]
};

SkipGcnParams register_skip_gcn(ad::ParameterSet& params, const std::string& prefix, Index d,
                                std::size_t num_layers, Initializer& init);

// Names follow block.relation.layer.tensor, e.g. "word.syntactic.0.gcn_weight".
MultiGcnParams register_multi_gcn(ad::ParameterSet& params, const std::string& block,
                                  const std::vector<std::string>& relations, Index d,
                                  std::size_t num_layers, Initializer& init);

BiLstmParams register_bilstm(ad::ParameterSet& params, const std::string& block, Index input_dim,
                             Index d, std::size_t num_layers, Initializer& init, double forget_bias);

/// A_hat . H . W_g (activation is applied by the caller).
Var gcn_layer(Var a_hat, Var h, Var w_g);

/// Per layer: H' = gcn(A_hat, H) + H (inner skip), then H = ReLU(H' W + b).
Var skip_gcn(Tape& tape, Var a_hat, Var x, const SkipGcnParams& params, bool inner_skip = true);

struct RelationInput {
  std::string name;
  Var adjacency;  // already normalized
};

struct MultiGcnOptions {
  bool inner_skip = true;
  bool outer_skip = true;
};

/// H = tanh(cat_r(H_r) W + b), plus X when the outer skip is on.
Var multi_gcn(Tape& tape, Var x, const std::vector<RelationInput>& graph, const MultiGcnParams& params,
              const MultiGcnOptions& options = {});

/// Stacked bidirectional LSTM over the rows of `x` (n x in) -> n x 2h.
Var bilstm(Tape& tape, Var x, const BiLstmParams& params);

}  // namespace multigras::layers
