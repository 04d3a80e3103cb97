#include "multigras/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace multigras::layers {

Initializer::Initializer(std::uint64_t seed, Index width)
    : rng_(seed), bound_(1.0 / std::sqrt(static_cast<double>(width))) {}

Matrix Initializer::weight(Index rows, Index cols) {
  std::uniform_real_distribution<double> dist(-bound_, bound_);
  Matrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = dist(rng_);
  return m;
}

SkipGcnParams register_skip_gcn(ad::ParameterSet& params, const std::string& prefix, Index d,
                                std::size_t num_layers, Initializer& init) {
  if (num_layers < 1) throw ConfigError("skip_gcn: at least one layer required");
  SkipGcnParams out;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::string base = prefix + "." + std::to_string(l) + ".";
    SkipGcnLayerParams layer;
    layer.gcn_weight = &params.add(base + "gcn_weight", init.weight(d, d));
    layer.weight = &params.add(base + "weight", init.weight(d, d));
    layer.bias = &params.add(base + "bias", Initializer::bias(d));
    out.layers.push_back(layer);
  }
  return out;
}

MultiGcnParams register_multi_gcn(ad::ParameterSet& params, const std::string& block,
                                  const std::vector<std::string>& relations, Index d,
                                  std::size_t num_layers, Initializer& init) {
  if (relations.empty()) throw ConfigError("multi_gcn '" + block + "': empty relation set");
  MultiGcnParams out;
  out.relations = relations;
  for (const auto& r : relations) out.branches.push_back(register_skip_gcn(params, block + "." + r, d, num_layers, init));
  const auto width = static_cast<Index>(relations.size()) * d;
  out.fusion_weight = &params.add(block + ".fusion.weight", init.weight(width, d));
  out.fusion_bias = &params.add(block + ".fusion.bias", Initializer::bias(d));
  return out;
}

BiLstmParams register_bilstm(ad::ParameterSet& params, const std::string& block, Index input_dim,
                             Index d, std::size_t num_layers, Initializer& init, double forget_bias) {
  if (d % 2 != 0) throw ConfigError("bilstm: width must be even, got " + std::to_string(d));
  if (num_layers < 1) throw ConfigError("bilstm: at least one layer required");
  BiLstmParams out;
  out.hidden = d / 2;
  const Index h = out.hidden;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const Index in = l == 0 ? input_dim : d;
    std::array<LstmDirectionParams, 2> dirs;
    const char* names[2] = {"lstm_fwd", "lstm_bwd"};
    for (int k = 0; k < 2; ++k) {
      const std::string base = block + "." + names[k] + "." + std::to_string(l) + ".";
      Matrix bias = Initializer::bias(4 * h);
      bias.middleCols(h, h).setConstant(forget_bias);
      dirs[static_cast<std::size_t>(k)].w_ih = &params.add(base + "w_ih", init.weight(in, 4 * h));
      dirs[static_cast<std::size_t>(k)].w_hh = &params.add(base + "w_hh", init.weight(h, 4 * h));
      dirs[static_cast<std::size_t>(k)].bias = &params.add(base + "bias", std::move(bias));
    }
    out.layers.push_back(dirs);
  }
  return out;
}

Var gcn_layer(Var a_hat, Var h, Var w_g) { return matmul(matmul(a_hat, h), w_g); }

Var skip_gcn(Tape& tape, Var a_hat, Var x, const SkipGcnParams& params, bool inner_skip) {
  Var h = x;
  for (const auto& layer : params.layers) {
    Var conv = gcn_layer(a_hat, h, tape.parameter(*layer.gcn_weight));
    Var pre = inner_skip ? add(conv, h) : conv;
    h = relu(add(matmul(pre, tape.parameter(*layer.weight)), tape.parameter(*layer.bias)));
  }
  return h;
}

Var multi_gcn(Tape& tape, Var x, const std::vector<RelationInput>& graph, const MultiGcnParams& params,
              const MultiGcnOptions& options) {
  if (graph.empty()) throw ConfigError("multi_gcn: empty relation set");
  if (graph.size() != params.relations.size())
    throw ConfigError("multi_gcn: graph has " + std::to_string(graph.size()) + " relations, parameters expect " +
                      std::to_string(params.relations.size()));
  std::vector<Var> branches;
  branches.reserve(graph.size());
  for (std::size_t r = 0; r < graph.size(); ++r) {
    if (graph[r].name != params.relations[r])
      throw ConfigError("multi_gcn: relation '" + graph[r].name + "' where '" + params.relations[r] + "' expected");
    if (graph[r].adjacency.rows() != x.rows())
      throw ad::ShapeError("multi_gcn: adjacency for '" + graph[r].name + "' does not match node count");
    branches.push_back(skip_gcn(tape, graph[r].adjacency, x, params.branches[r], options.inner_skip));
  }
  Var fused = branches.size() == 1 ? branches.front() : concat(branches, 1);
  Var h = tanh(add(matmul(fused, tape.parameter(*params.fusion_weight)), tape.parameter(*params.fusion_bias)));
  return options.outer_skip ? add(h, x) : h;
}

namespace {

Var lstm_direction(Tape& tape, Var x, const LstmDirectionParams& p, Index hidden, bool reverse) {
  const Index n = x.rows();
  // Input projections for all steps at once; each step slices its row.
  Var projected = add(matmul(x, tape.parameter(*p.w_ih)), tape.parameter(*p.bias));
  Var w_hh = tape.parameter(*p.w_hh);
  Var h = tape.constant(Matrix::Zero(1, hidden));
  Var c = tape.constant(Matrix::Zero(1, hidden));
  std::vector<Var> outputs(static_cast<std::size_t>(n));
  for (Index step = 0; step < n; ++step) {
    const Index t = reverse ? n - 1 - step : step;
    Var gates = add(slice(projected, 0, t, 1), matmul(h, w_hh));
    Var i = sigmoid(slice(gates, 1, 0, hidden));
    Var f = sigmoid(slice(gates, 1, hidden, hidden));
    Var g = tanh(slice(gates, 1, 2 * hidden, hidden));
    Var o = sigmoid(slice(gates, 1, 3 * hidden, hidden));
    c = add(mul(f, c), mul(i, g));
    h = mul(o, tanh(c));
    outputs[static_cast<std::size_t>(t)] = h;
  }
  return concat(outputs, 0);
}

}  // namespace

Var bilstm(Tape& tape, Var x, const BiLstmParams& params) {
  if (x.rows() < 1) throw ad::ShapeError("bilstm: empty sequence");
  Var layer_input = x;
  for (const auto& layer : params.layers) {
    Var fwd = lstm_direction(tape, layer_input, layer[0], params.hidden, false);
    Var bwd = lstm_direction(tape, layer_input, layer[1], params.hidden, true);
    layer_input = ad::concat({fwd, bwd}, 1);
  }
  return layer_input;
}

}  // namespace multigras::layers
