#include "multigras/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace multigras::ad {

namespace {

std::string shape_str(const Matrix& m) {
  return "(" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")";
}

[[noreturn]] void shape_fail(const char* op, const Matrix& a, const Matrix& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " + shape_str(b));
}

// Mixes an elementwise branch mask into the tape fingerprint.
template <typename Mask>
void note_mask(Tape& tape, const Mask& mask) {
  if (!tape.tracking_branches()) return;
  for (Index r = 0; r < mask.rows(); ++r)
    for (Index c = 0; c < mask.cols(); ++c) tape.note_branch(mask(r, c) ? 0x9e3779b97f4a7c15ULL : 0x2545f4914f6cdd1dULL);
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor / ParameterSet

Tensor::Tensor(Index rows, Index cols, bool requires_grad)
    : value_(Matrix::Zero(rows, cols)), grad_(Matrix::Zero(rows, cols)), requires_grad_(requires_grad) {}

Tensor::Tensor(Matrix value, bool requires_grad)
    : value_(std::move(value)), requires_grad_(requires_grad) {
  grad_.setZero(value_.rows(), value_.cols());
}

Tensor& ParameterSet::add(const std::string& name, Matrix init) {
  auto [it, inserted] = tensors_.try_emplace(name, std::move(init));
  if (!inserted) throw std::invalid_argument("ParameterSet::add: duplicate tensor '" + name + "'");
  return it->second;
}

Tensor& ParameterSet::at(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw std::out_of_range("ParameterSet: no tensor '" + name + "'");
  return it->second;
}

const Tensor& ParameterSet::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw std::out_of_range("ParameterSet: no tensor '" + name + "'");
  return it->second;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors_) n += static_cast<std::size_t>(t.size());
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& [name, t] : tensors_) t.zero_grad();
}

// ---------------------------------------------------------------------------
// Tape

const Matrix& Var::value() const { return tape_->value(id_); }

double Var::scalar() const {
  const auto& v = value();
  if (v.size() != 1) throw ShapeError("Var::scalar: value has shape " + shape_str(v));
  return v(0, 0);
}

Var Tape::constant(Matrix value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(const Tensor& param) {
  if (auto it = param_nodes_.find(&param); it != param_nodes_.end()) return Var(this, it->second);
  Node node;
  node.value = param.value();
  node.needs_grad = grad_enabled_ && param.requires_grad();
  node.param = &param;
  nodes_.push_back(std::move(node));
  param_nodes_.emplace(&param, nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, BackwardFn backward) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(backward));
}

Var Tape::record(Matrix value, std::span<const Var> inputs, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  if (grad_enabled_) {
    node.needs_grad = std::any_of(inputs.begin(), inputs.end(),
                                  [this](const Var& v) { return nodes_[v.id()].needs_grad; });
  }
  if (node.needs_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

void Tape::accumulate(std::size_t id, const Matrix& contribution) {
  accumulate_expr(id, contribution);
}

void Tape::accumulate_block(std::size_t id, Index row, Index col, const Matrix& block) {
  auto& node = nodes_[id];
  if (!node.needs_grad) return;
  if (node.grad.size() == 0) node.grad = Matrix::Zero(node.value.rows(), node.value.cols());
  node.grad.block(row, col, block.rows(), block.cols()) += block;
}

void Tape::backward(Var loss) {
  if (!grad_enabled_) throw std::logic_error("backward: tape was recorded without gradients");
  if (backward_done_) throw std::logic_error("backward: tape has already been replayed; re-run forward");
  if (loss.value().size() != 1) throw ShapeError("backward: loss must be scalar, got " + shape_str(loss.value()));
  backward_done_ = true;
  auto& root = nodes_[loss.id()];
  if (!root.needs_grad) return;
  root.grad = Matrix::Ones(1, 1);
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    auto& node = nodes_[i];
    if (!node.backward || node.grad.size() == 0) continue;
    node.backward(*this, node.value, node.grad);
  }
}

Matrix Tape::gradient(Var v) const {
  const auto& node = nodes_[v.id()];
  if (node.grad.size() == 0) return Matrix::Zero(node.value.rows(), node.value.cols());
  return node.grad;
}

Matrix Tape::parameter_gradient(const Tensor& param) const {
  auto it = param_nodes_.find(&param);
  if (it == param_nodes_.end()) return Matrix::Zero(param.rows(), param.cols());
  return gradient(Var(const_cast<Tape*>(this), it->second));
}

void backward(Var loss, ParameterSet& params) {
  Tape& tape = loss.tape();
  tape.backward(loss);
  for (auto& [name, t] : params) {
    if (!t.requires_grad()) continue;
    if (t.grad().rows() != t.rows() || t.grad().cols() != t.cols()) t.zero_grad();
    t.grad() += tape.parameter_gradient(t);
  }
}

// ---------------------------------------------------------------------------
// Ops

Var matmul(Var a, Var b) {
  const auto& av = a.value();
  const auto& bv = b.value();
  if (av.cols() != bv.rows()) shape_fail("matmul", av, bv);
  Matrix out = av * bv;
  const auto ia = a.id();
  const auto ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, const Matrix&, const Matrix& g) {
    if (t.needs_grad(ia)) t.accumulate_expr(ia, g * t.value(ib).transpose());
    if (t.needs_grad(ib)) t.accumulate_expr(ib, t.value(ia).transpose() * g);
  });
}

Var add(Var a, Var b) {
  const auto& av = a.value();
  const auto& bv = b.value();
  const auto ia = a.id();
  const auto ib = b.id();
  if (av.rows() == bv.rows() && av.cols() == bv.cols()) {
    Matrix out = av + bv;
    return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, const Matrix&, const Matrix& g) {
      t.accumulate(ia, g);
      t.accumulate(ib, g);
    });
  }
  if (bv.rows() == 1 && bv.cols() == av.cols()) {
    Matrix out = av.rowwise() + bv.row(0);
    return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, const Matrix&, const Matrix& g) {
      t.accumulate(ia, g);
      if (t.needs_grad(ib)) t.accumulate_expr(ib, g.colwise().sum());
    });
  }
  shape_fail("add", av, bv);
}

Var sub(Var a, Var b) {
  const auto& av = a.value();
  const auto& bv = b.value();
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) shape_fail("sub", av, bv);
  Matrix out = av - bv;
  const auto ia = a.id();
  const auto ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, const Matrix&, const Matrix& g) {
    t.accumulate(ia, g);
    if (t.needs_grad(ib)) t.accumulate_expr(ib, -g);
  });
}

Var mul(Var a, Var b) {
  const auto& av = a.value();
  const auto& bv = b.value();
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) shape_fail("mul", av, bv);
  Matrix out = av.cwiseProduct(bv);
  const auto ia = a.id();
  const auto ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, const Matrix&, const Matrix& g) {
    if (t.needs_grad(ia)) t.accumulate_expr(ia, g.cwiseProduct(t.value(ib)));
    if (t.needs_grad(ib)) t.accumulate_expr(ib, g.cwiseProduct(t.value(ia)));
  });
}

Var scale(Var a, double s) {
  Matrix out = a.value() * s;
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, s](Tape& t, const Matrix&, const Matrix& g) {
    t.accumulate_expr(ia, g * s);
  });
}

Var add_scalar(Var a, double s) {
  Matrix out = a.value().array() + s;
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia](Tape& t, const Matrix&, const Matrix& g) {
    t.accumulate(ia, g);
  });
}

Var tanh(Var a) {
  Matrix out = a.value().array().tanh();
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia](Tape& t, const Matrix& y, const Matrix& g) {
    t.accumulate_expr(ia, (g.array() * (1.0 - y.array().square())).matrix());
  });
}

Var relu(Var a) {
  note_mask(a.tape(), (a.value().array() > 0.0).eval());
  Matrix out = a.value().cwiseMax(0.0);
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia](Tape& t, const Matrix&, const Matrix& g) {
    // Subgradient 0 at the kink.
    t.accumulate_expr(ia, (t.value(ia).array() > 0.0).select(g.array(), 0.0).matrix());
  });
}

Var sigmoid(Var a) {
  Matrix out = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia](Tape& t, const Matrix& y, const Matrix& g) {
    t.accumulate_expr(ia, (g.array() * y.array() * (1.0 - y.array())).matrix());
  });
}

Var abs(Var a) {
  note_mask(a.tape(), (a.value().array() > 0.0).eval());
  note_mask(a.tape(), (a.value().array() < 0.0).eval());
  Matrix out = a.value().cwiseAbs();
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia](Tape& t, const Matrix&, const Matrix& g) {
    // sign(x), with subgradient 0 at x = 0.
    const auto& x = t.value(ia).array();
    Matrix sign = ((x > 0.0).cast<double>() - (x < 0.0).cast<double>()).matrix();
    t.accumulate_expr(ia, g.cwiseProduct(sign));
  });
}

Var transpose(Var a) {
  Matrix out = a.value().transpose();
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia](Tape& t, const Matrix&, const Matrix& g) {
    t.accumulate_expr(ia, g.transpose());
  });
}

Var concat(std::span<const Var> parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  if (axis != 0 && axis != 1) throw ShapeError("concat: axis must be 0 or 1");
  const auto& first = parts.front().value();
  Index rows = 0, cols = 0;
  std::vector<Index> offsets;
  std::vector<std::size_t> ids;
  for (const auto& p : parts) {
    const auto& v = p.value();
    if (axis == 0 ? v.cols() != first.cols() : v.rows() != first.rows()) shape_fail("concat", first, v);
    offsets.push_back(axis == 0 ? rows : cols);
    ids.push_back(p.id());
    if (axis == 0) {
      rows += v.rows();
      cols = v.cols();
    } else {
      cols += v.cols();
      rows = v.rows();
    }
  }
  Matrix out(rows, cols);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& v = parts[k].value();
    if (axis == 0) {
      out.middleRows(offsets[k], v.rows()) = v;
    } else {
      out.middleCols(offsets[k], v.cols()) = v;
    }
  }
  return parts.front().tape().record(
      std::move(out), parts,
      [ids = std::move(ids), offsets = std::move(offsets), axis](Tape& t, const Matrix&, const Matrix& g) {
        for (std::size_t k = 0; k < ids.size(); ++k) {
          if (!t.needs_grad(ids[k])) continue;
          const auto& v = t.value(ids[k]);
          if (axis == 0) {
            t.accumulate_expr(ids[k], g.middleRows(offsets[k], v.rows()));
          } else {
            t.accumulate_expr(ids[k], g.middleCols(offsets[k], v.cols()));
          }
        }
      });
}

Var concat(std::initializer_list<Var> parts, int axis) {
  return concat(std::span<const Var>(parts.begin(), parts.size()), axis);
}

Var slice(Var a, int axis, Index begin, Index length) {
  const auto& av = a.value();
  const Index extent = axis == 0 ? av.rows() : av.cols();
  if ((axis != 0 && axis != 1) || begin < 0 || length < 0 || begin + length > extent) {
    throw ShapeError("slice: range [" + std::to_string(begin) + ", " + std::to_string(begin + length) +
                     ") on axis " + std::to_string(axis) + " out of bounds for " + shape_str(av));
  }
  Matrix out = axis == 0 ? Matrix(av.middleRows(begin, length)) : Matrix(av.middleCols(begin, length));
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, axis, begin](Tape& t, const Matrix&, const Matrix& g) {
    if (axis == 0) {
      t.accumulate_block(ia, begin, 0, g);
    } else {
      t.accumulate_block(ia, 0, begin, g);
    }
  });
}

Var rowwise_max_pool(Var a) {
  const auto& av = a.value();
  if (av.rows() == 0) throw ShapeError("rowwise_max_pool: empty input " + shape_str(av));
  Matrix out(1, av.cols());
  std::vector<Index> argmax(static_cast<std::size_t>(av.cols()), 0);
  for (Index c = 0; c < av.cols(); ++c) {
    Index best = 0;
    for (Index r = 1; r < av.rows(); ++r)
      if (av(r, c) > av(best, c)) best = r;
    argmax[static_cast<std::size_t>(c)] = best;
    out(0, c) = av(best, c);
    if (a.tape().tracking_branches()) a.tape().note_branch(static_cast<std::uint64_t>(best) + 1);
  }
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, argmax = std::move(argmax)](Tape& t, const Matrix&, const Matrix& g) {
    const auto& x = t.value(ia);
    Matrix grad = Matrix::Zero(x.rows(), x.cols());
    for (Index c = 0; c < x.cols(); ++c) grad(argmax[static_cast<std::size_t>(c)], c) = g(0, c);
    t.accumulate(ia, grad);
  });
}

Var sum(Var a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia](Tape& t, const Matrix&, const Matrix& g) {
    const auto& x = t.value(ia);
    t.accumulate_expr(ia, Matrix::Constant(x.rows(), x.cols(), g(0, 0)));
  });
}

Var mean(Var a) {
  const auto n = static_cast<double>(a.value().size());
  if (n == 0) throw ShapeError("mean: empty input");
  return scale(sum(a), 1.0 / n);
}

Var threshold_below(Var a, double threshold) {
  const auto& av = a.value();
  note_mask(a.tape(), (av.array() < threshold).eval());
  Matrix out = (av.array() < threshold).select(0.0, av.array()).matrix();
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, threshold](Tape& t, const Matrix&, const Matrix& g) {
    t.accumulate_expr(ia, (t.value(ia).array() < threshold).select(0.0, g.array()).matrix());
  });
}

Var normalize_adjacency(Var a) {
  const auto& av = a.value();
  if (av.rows() != av.cols()) shape_fail("normalize_adjacency", av, av);
  const Index n = av.rows();
  Matrix b = av + Matrix::Identity(n, n);
  Eigen::VectorXd s(n);
  for (Index i = 0; i < n; ++i) s(i) = 1.0 / std::sqrt(b.row(i).sum());
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = s(i) * b(i, j) * s(j);
  const auto ia = a.id();
  return a.tape().record(std::move(out), {a}, [ia, s](Tape& t, const Matrix&, const Matrix& g) {
    const Index n = s.size();
    const Matrix b = t.value(ia) + Matrix::Identity(n, n);
    // out_ij = s_i b_ij s_j with s_i = (sum_j b_ij)^(-1/2).
    Matrix grad(n, n);
    Eigen::VectorXd ds = Eigen::VectorXd::Zero(n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        grad(i, j) = g(i, j) * s(i) * s(j);
        ds(i) += g(i, j) * b(i, j) * s(j);
        ds(j) += g(i, j) * b(i, j) * s(i);
      }
    }
    for (Index i = 0; i < n; ++i) {
      const double dd = ds(i) * -0.5 * s(i) * s(i) * s(i);
      grad.row(i).array() += dd;
    }
    t.accumulate(ia, grad);
  });
}

Var binary_cross_entropy(Var p, std::span<const int> labels) {
  const auto& pv = p.value();
  if (static_cast<std::size_t>(pv.size()) != labels.size() || labels.empty()) {
    throw ShapeError("binary_cross_entropy: " + std::to_string(pv.size()) + " scores vs " +
                     std::to_string(labels.size()) + " labels");
  }
  const auto count = static_cast<double>(labels.size());
  double total = 0.0;
  for (Index k = 0; k < pv.size(); ++k) {
    const double q = std::clamp(pv.data()[k], kProbClamp, 1.0 - kProbClamp);
    if (p.tape().tracking_branches()) p.tape().note_branch(q == pv.data()[k] ? 1 : 2);
    const int y = labels[static_cast<std::size_t>(k)];
    total += y == 1 ? -std::log(q) : -std::log(1.0 - q);
  }
  Matrix out(1, 1);
  out(0, 0) = total / count;
  const auto ip = p.id();
  std::vector<int> ys(labels.begin(), labels.end());
  return p.tape().record(std::move(out), {p}, [ip, ys = std::move(ys), count](Tape& t, const Matrix&, const Matrix& g) {
    const auto& x = t.value(ip);
    Matrix grad = Matrix::Zero(x.rows(), x.cols());
    for (Index k = 0; k < x.size(); ++k) {
      const double q = x.data()[k];
      if (q < kProbClamp || q > 1.0 - kProbClamp) continue;
      const double d = ys[static_cast<std::size_t>(k)] == 1 ? -1.0 / q : 1.0 / (1.0 - q);
      grad.data()[k] = g(0, 0) * d / count;
    }
    t.accumulate(ip, grad);
  });
}

// ---------------------------------------------------------------------------
// Optimization

void adam_step(ParameterSet& params, AdamState& state) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (auto& [name, tensor] : params) {
    if (!tensor.requires_grad()) continue;
    auto& m = state.first_moment[name];
    auto& v = state.second_moment[name];
    if (m.size() == 0) m = Matrix::Zero(tensor.rows(), tensor.cols());
    if (v.size() == 0) v = Matrix::Zero(tensor.rows(), tensor.cols());
    const auto& g = tensor.grad();
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    auto& value = tensor.value();
    for (Index k = 0; k < value.size(); ++k) {
      const double m_hat = m.data()[k] / c1;
      const double v_hat = v.data()[k] / c2;
      value.data()[k] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
    tensor.zero_grad();
  }
}

double clip_grad_norm(ParameterSet& params, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, t] : params)
    if (t.requires_grad()) sq += t.grad().squaredNorm();
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double factor = max_norm / norm;
    for (auto& [name, t] : params)
      if (t.requires_grad()) t.grad() *= factor;
  }
  return norm;
}

GradCheckReport grad_check(const std::function<Var(Tape&)>& loss_fn, ParameterSet& params,
                           const GradCheckOptions& options) {
  params.zero_grad();
  {
    Tape tape;
    backward(loss_fn(tape), params);
  }
  auto evaluate = [&](std::uint64_t* fingerprint) {
    Tape tape(false);
    tape.track_branches(true);
    const double value = loss_fn(tape).scalar();
    *fingerprint = tape.branch_fingerprint();
    return value;
  };
  std::uint64_t base_branch = 0;
  evaluate(&base_branch);

  GradCheckReport report;
  std::mt19937_64 rng(options.seed);
  const double h = options.step;
  for (auto& [name, tensor] : params) {
    if (!tensor.requires_grad()) continue;
    std::vector<Index> coords(static_cast<std::size_t>(tensor.size()));
    std::iota(coords.begin(), coords.end(), Index{0});
    if (options.max_coords_per_tensor != 0 && coords.size() > options.max_coords_per_tensor) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coords_per_tensor);
      std::sort(coords.begin(), coords.end());
    }
    double worst = 0.0;
    for (auto k : coords) {
      double& slot = tensor.value().data()[k];
      const double original = slot;
      std::uint64_t plus_branch = 0, minus_branch = 0;
      slot = original + h;
      const double f_plus = evaluate(&plus_branch);
      slot = original - h;
      const double f_minus = evaluate(&minus_branch);
      slot = original;
      if (plus_branch != base_branch || minus_branch != base_branch) {
        ++report.coordinates_at_kinks;
        continue;
      }
      const double numeric = (f_plus - f_minus) / (2.0 * h);
      const double analytic = tensor.grad().data()[k];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), options.denominator_floor});
      const double err = std::abs(analytic - numeric) / denom;
      worst = std::max(worst, err);
      if (err > report.max_relative_error) {
        report.max_relative_error = err;
        report.worst_tensor = name;
        report.worst_index = k;
        report.worst_analytic = analytic;
        report.worst_numeric = numeric;
      }
      ++report.coordinates_checked;
    }
    report.per_tensor[name] = worst;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Checkpoints

std::string checkpoint_to_string(const ParameterSet& params, const nlohmann::json& metadata) {
  nlohmann::json j;
  j["format"] = "multigras-checkpoint";
  j["version"] = kCheckpointVersion;
  j["metadata"] = metadata;
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& [name, t] : params) {
    std::vector<double> values(t.value().data(), t.value().data() + t.size());
    tensors[name] = {{"shape", {t.rows(), t.cols()}}, {"values", std::move(values)}};
  }
  j["tensors"] = std::move(tensors);
  return j.dump();
}

void save_checkpoint(const std::filesystem::path& path, const ParameterSet& params,
                     const nlohmann::json& metadata) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  out << checkpoint_to_string(params, metadata) << '\n';
}

namespace {

nlohmann::json read_checkpoint_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "multigras-checkpoint")
    throw ParseError(path.string() + ": not a checkpoint file");
  if (j.value("version", -1) != kCheckpointVersion)
    throw ParseError(path.string() + ": unsupported checkpoint version");
  return j;
}

}  // namespace

nlohmann::json read_checkpoint_metadata(const std::filesystem::path& path) {
  return read_checkpoint_json(path).value("metadata", nlohmann::json::object());
}

nlohmann::json load_checkpoint(const std::filesystem::path& path, ParameterSet& params) {
  const auto j = read_checkpoint_json(path);
  const auto& tensors = j.at("tensors");
  for (const auto& [name, entry] : tensors.items()) {
    if (!params.contains(name)) throw ShapeError("checkpoint tensor '" + name + "' is not part of the model");
  }
  for (auto& [name, t] : params) {
    if (!tensors.contains(name)) throw ShapeError("checkpoint is missing tensor '" + name + "'");
    const auto& entry = tensors.at(name);
    const auto shape = entry.at("shape").get<std::vector<Index>>();
    if (shape.size() != 2 || shape[0] != t.rows() || shape[1] != t.cols()) {
      throw ShapeError("checkpoint tensor '" + name + "' has shape " + entry.at("shape").dump() +
                       ", model expects [" + std::to_string(t.rows()) + "," + std::to_string(t.cols()) + "]");
    }
    const auto values = entry.at("values").get<std::vector<double>>();
    if (static_cast<Index>(values.size()) != t.size())
      throw ShapeError("checkpoint tensor '" + name + "' has the wrong number of values");
    std::copy(values.begin(), values.end(), t.value().data());
    t.zero_grad();
  }
  return j.value("metadata", nlohmann::json::object());
}

}  // namespace multigras::ad
