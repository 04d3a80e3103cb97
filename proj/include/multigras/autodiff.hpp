#pragma once

// Dense reverse-mode automatic differentiation over double-precision matrices.
//
// Every value is a 2-D row-major matrix (vectors are 1 x n rows). A Tape
// records each primitive op together with a closure that maps the output
// gradient onto its inputs; backward() replays the closures in reverse order.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "multigras/corpus.hpp"

namespace multigras::ad {

using Index = Eigen::Index;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A named trainable array: value plus an equally shaped gradient buffer.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Index rows, Index cols, bool requires_grad = true);
  explicit Tensor(Matrix value, bool requires_grad = true);

  std::vector<Index> shape() const { return {value_.rows(), value_.cols()}; }
  Index rows() const { return value_.rows(); }
  Index cols() const { return value_.cols(); }
  Index size() const { return value_.size(); }

  Matrix& value() { return value_; }
  const Matrix& value() const { return value_; }
  Matrix& grad() { return grad_; }
  const Matrix& grad() const { return grad_; }

  bool requires_grad() const { return requires_grad_; }
  void set_requires_grad(bool on) { requires_grad_ = on; }
  void zero_grad() { grad_.setZero(value_.rows(), value_.cols()); }

 private:
  Matrix value_;
  Matrix grad_;
  bool requires_grad_ = true;
};

/// Ordered name -> Tensor map. Tensor addresses are stable for the lifetime of the set.
class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(const ParameterSet&) = delete;
  ParameterSet& operator=(const ParameterSet&) = delete;
  ParameterSet(ParameterSet&&) noexcept = default;
  ParameterSet& operator=(ParameterSet&&) noexcept = default;

  Tensor& add(const std::string& name, Matrix init);
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }

  std::size_t tensor_count() const { return tensors_.size(); }
  std::size_t scalar_count() const;
  void zero_grad();

  auto begin() { return tensors_.begin(); }
  auto end() { return tensors_.end(); }
  auto begin() const { return tensors_.begin(); }
  auto end() const { return tensors_.end(); }

 private:
  std::map<std::string, Tensor> tensors_;
};

class Tape;

/// Handle to a node recorded on a Tape.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  double scalar() const;
  std::size_t id() const { return id_; }
  Tape& tape() const { return *tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  // Receives the node's own value and its accumulated output gradient.
  using BackwardFn = std::function<void(Tape&, const Matrix& out, const Matrix& grad_out)>;

  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  // Records (once per tape) a leaf bound to `param`; gradients flow back only if
  // the tape records gradients and the tensor requires them.
  Var parameter(const Tensor& param);

  // Populates node gradients from a scalar loss. A tape can be replayed only once.
  void backward(Var loss);
  bool backward_done() const { return backward_done_; }

  // Gradient of the loss w.r.t. a recorded node (zero if unreached).
  Matrix gradient(Var v) const;
  Matrix parameter_gradient(const Tensor& param) const;

  std::size_t size() const { return nodes_.size(); }
  bool grad_enabled() const { return grad_enabled_; }

  // Branch fingerprint of the non-smooth ops (relu, abs, max-pool, thresholds,
  // probability clamps) recorded so far. Two evaluations with equal fingerprints
  // took the same smooth piece of the function.
  void track_branches(bool on) { track_branches_ = on; }
  bool tracking_branches() const { return track_branches_; }
  void note_branch(std::uint64_t token) {
    branch_hash_ = (branch_hash_ ^ token) * 0x100000001b3ULL;
  }
  std::uint64_t branch_fingerprint() const { return branch_hash_; }

  // Op-author interface.
  Var record(Matrix value, std::initializer_list<Var> inputs, BackwardFn backward);
  Var record(Matrix value, std::span<const Var> inputs, BackwardFn backward);
  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
  void accumulate(std::size_t id, const Matrix& contribution);
  // Adds `block` into the gradient of node `id` at (row, col).
  void accumulate_block(std::size_t id, Index row, Index col, const Matrix& block);
  template <typename Expr>
  void accumulate_expr(std::size_t id, const Expr& contribution) {
    auto& node = nodes_[id];
    if (!node.needs_grad) return;
    if (node.grad.size() == 0) {
      node.grad = contribution;
    } else {
      node.grad += contribution;
    }
  }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool needs_grad = false;
    BackwardFn backward;
    const Tensor* param = nullptr;
  };

  std::deque<Node> nodes_;
  std::unordered_map<const Tensor*, std::size_t> param_nodes_;
  bool grad_enabled_ = true;
  bool backward_done_ = false;
  bool track_branches_ = false;
  std::uint64_t branch_hash_ = 0xcbf29ce484222325ULL;
};

/// Runs tape backward from `loss` and adds the parameter gradients into every tensor
/// of `params` that requires them (unreached tensors receive zero).
void backward(Var loss, ParameterSet& params);

// ---------------------------------------------------------------------------
// Primitive ops. Shape mismatches throw ShapeError naming the op and shapes.

Var matmul(Var a, Var b);
// Elementwise a + b; `b` may also be a 1 x cols row broadcast over a's rows.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var tanh(Var a);
Var relu(Var a);
Var sigmoid(Var a);
Var abs(Var a);
Var transpose(Var a);
// axis 0 stacks rows, axis 1 stacks columns.
Var concat(std::span<const Var> parts, int axis);
Var concat(std::initializer_list<Var> parts, int axis);
Var slice(Var a, int axis, Index begin, Index length);
// Columnwise max over rows: n x d -> 1 x d. Ties go to the lowest row.
Var rowwise_max_pool(Var a);
Var sum(Var a);
Var mean(Var a);
// Entries below `threshold` are zeroed (and receive no gradient).
Var threshold_below(Var a, double threshold);
// Differentiable D^-1/2 (A + I) D^-1/2 with D the row sums of A + I.
Var normalize_adjacency(Var a);
// Mean binary cross-entropy of probabilities p (M x 1) against 0/1 labels; p is
// clamped to [kProbClamp, 1 - kProbClamp].
inline constexpr double kProbClamp = 1e-7;
Var binary_cross_entropy(Var p, std::span<const int> labels);

// ---------------------------------------------------------------------------
// Optimization

struct AdamState {
  double learning_rate = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t step = 0;
  std::map<std::string, Matrix> first_moment;
  std::map<std::string, Matrix> second_moment;
};

/// Bias-corrected Adam update over all tensors that require gradients; clears the grads.
void adam_step(ParameterSet& params, AdamState& state);

/// Scales gradients so their global L2 norm is at most `max_norm`; returns the pre-clip norm.
double clip_grad_norm(ParameterSet& params, double max_norm);

struct GradCheckOptions {
  double step = 1e-5;
  // 0 checks every coordinate of every tensor.
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 0;
  // Lower bound on the relative-error denominator. A central difference of a loss
  // near 1 resolves gradients only to about ulp(1) / 2h ~ 1e-11, so gradients much
  // smaller than this floor are compared in absolute terms.
  double denominator_floor = 1e-7;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::map<std::string, double> per_tensor;
  std::size_t coordinates_checked = 0;
  // Coordinates whose +h and -h evaluations fall on different sides of a kink;
  // the central difference is not a derivative there, so they are not scored.
  std::size_t coordinates_at_kinks = 0;
  // Coordinate behind max_relative_error.
  std::string worst_tensor;
  Index worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Central finite differences vs reverse-mode gradients. The error per coordinate is
/// |a - n| / max(|a|, |n|, denominator_floor). Coordinates whose perturbation crosses a kink are
/// counted in coordinates_at_kinks instead.
GradCheckReport grad_check(const std::function<Var(Tape&)>& loss_fn, ParameterSet& params,
                           const GradCheckOptions& options = {});

// ---------------------------------------------------------------------------
// Checkpoints: versioned JSON, name -> {shape, row-major values}.

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const ParameterSet& params,
                     const nlohmann::json& metadata = nlohmann::json::object());
std::string checkpoint_to_string(const ParameterSet& params,
                                 const nlohmann::json& metadata = nlohmann::json::object());

// Loads values into an already-shaped set. Every tensor must be present with a matching
// shape, and the file may not carry extra tensors. Returns the stored metadata.
nlohmann::json load_checkpoint(const std::filesystem::path& path, ParameterSet& params);
nlohmann::json read_checkpoint_metadata(const std::filesystem::path& path);

}  // namespace multigras::ad
