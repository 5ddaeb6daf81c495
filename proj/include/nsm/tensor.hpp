// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace nsm::ad {

inline constexpr double kDivideFloor = 1e-12;

struct Param {
  std::string name;
  int rows = 0, cols = 0;
  std::vector<double> value;
  std::vector<double> grad;
};

// Named parameters with stable (insertion) iteration order and per-parameter
// gradient accumulators.
class ParamStore {
 public:
  int add(std::string name, int rows, int cols, std::vector<double> value) {
    if (static_cast<int>(value.size()) != rows * cols)
      throw std::invalid_argument("ParamStore::add: value size mismatch");
    if (index_.count(name)) throw std::invalid_argument("ParamStore::add: duplicate name " + name);
    int id = static_cast<int>(params_.size());
    index_.emplace(name, id);
    params_.push_back({std::move(name), rows, cols, std::move(value),
                       std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0)});
    return id;
  }

  int size() const { return static_cast<int>(params_.size()); }
  Param& at(int id) { return params_.at(id); }
  const Param& at(int id) const { return params_.at(id); }
  int id_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("ParamStore: unknown parameter " + name);
    return it->second;
  }
  Param& named(const std::string& name) { return params_[id_of(name)]; }
  const Param& named(const std::string& name) const { return params_[id_of(name)]; }

  void zero_grad() {
    for (auto& p : params_) std::fill(p.grad.begin(), p.grad.end(), 0.0);
  }

  std::size_t coordinate_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
  }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Param> params_;
  std::unordered_map<std::string, int> index_;
};

enum class Op : std::uint8_t {
  leaf,
  matmul,
  add,          // same shape, or rhs is a 1 x cols row broadcast
  subtract,     // same broadcast rule as add
  multiply,     // elementwise, same shape
  divide,       // elementwise, same shape; |denominator| must be >= 1e-12
  sigmoid,
  tanh,
  relu,
  positive_part,  // hinge [x]+; same kernel as relu, kept as its own kind
  exp,
  negate,
  clamp_min,     // attr = floor c; gradient passes where input > c
  elementwise_min,
  elementwise_max,
  row_sum,       // m x n -> m x 1
  row_mean,      // m x n -> m x 1
  column_max,    // m x n -> 1 x n, argmax row recorded (ties -> lowest row)
  layer_norm,    // rowwise, attr = epsilon
  scale,         // attr = scalar factor
  add_scalar,    // attr = scalar addend
};

// Lightweight handle into the active recording.
struct Tensor {
  int id = -1;
  int rows = 0;
  int cols = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

// A recording of tensor operations supporting reverse-mode gradients. Single
// threaded; independent recordings may run concurrently.
class Tape {
 public:
  Tensor constant(int rows, int cols, std::vector<double> values) {
    if (static_cast<int>(values.size()) != rows * cols)
      throw std::invalid_argument("Tape::constant: value size mismatch");
    return push(Op::leaf, rows, cols, -1, -1, 0.0, std::move(values), false, -1);
  }

  Tensor scalar(double v) { return constant(1, 1, {v}); }

  // Leaf bound to store parameter `param_id`; gradients flow back into the
  // store passed to backward().
  Tensor param(const ParamStore& store, int param_id) {
    const Param& p = store.at(param_id);
    return push(Op::leaf, p.rows, p.cols, -1, -1, 0.0, p.value, true, param_id);
  }

  const std::vector<double>& value(Tensor t) const { return nodes_.at(t.id).val; }
  double scalar_value(Tensor t) const {
    if (t.rows != 1 || t.cols != 1) throw std::invalid_argument("Tape::scalar_value: not a scalar");
    return nodes_.at(t.id).val[0];
  }

  Tensor apply(Op op, std::initializer_list<Tensor> inputs, double attr = 0.0) {
    std::vector<Tensor> in(inputs);
    return apply(op, std::span<const Tensor>(in), attr);
  }

  Tensor apply(Op op, std::span<const Tensor> in, double attr = 0.0);

  // Reverse-topological accumulation from a scalar loss; d loss / d loss = 1.
  // Gradients are *added* into the store's accumulators.
  void backward(Tensor loss, ParamStore& store);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Op op;
    int rows, cols;
    int in0, in1;
    double attr;
    bool needs_grad;
    int param;           // leaf binding, -1 for constants
    std::vector<double> val;
    std::vector<double> aux;  // column_max: argmax rows; layer_norm: mean, inv_std per row
  };

  std::vector<Node> nodes_;

  Tensor push(Op op, int rows, int cols, int in0, int in1, double attr, std::vector<double> val,
              bool needs_grad, int param, std::vector<double> aux = {}) {
    nodes_.push_back({op, rows, cols, in0, in1, attr, needs_grad, param, std::move(val), std::move(aux)});
    return Tensor{static_cast<int>(nodes_.size()) - 1, rows, cols};
  }

  const Node& node(int id) const { return nodes_[id]; }

  static void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
  }
};

inline Tensor Tape::apply(Op op, std::span<const Tensor> in, double attr) {
  auto unary = [&](auto&& f) {
    require(in.size() == 1, "apply: unary op expects 1 input");
    const Node& a = node(in[0].id);
    std::vector<double> out(a.val.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(a.val[i]);
    return push(op, a.rows, a.cols, in[0].id, -1, attr, std::move(out), a.needs_grad, -1);
  };

  switch (op) {
    case Op::leaf:
      throw std::invalid_argument("apply: leaf is not an applicable primitive");

    case Op::matmul: {
      require(in.size() == 2, "matmul expects 2 inputs");
      const Node& a = node(in[0].id);
      const Node& b = node(in[1].id);
      require(a.cols == b.rows, "matmul: inner dimensions differ");
      const int m = a.rows, k = a.cols, n = b.cols;
      std::vector<double> out(static_cast<std::size_t>(m) * n, 0.0);
      for (int i = 0; i < m; ++i) {
        const double* arow = a.val.data() + static_cast<std::size_t>(i) * k;
        double* orow = out.data() + static_cast<std::size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
          const double av = arow[kk];
          if (av == 0.0) continue;
          const double* brow = b.val.data() + static_cast<std::size_t>(kk) * n;
          for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
      }
      return push(op, m, n, in[0].id, in[1].id, attr, std::move(out),
                  a.needs_grad || b.needs_grad, -1);
    }

    case Op::add:
    case Op::subtract: {
      require(in.size() == 2, "add/subtract expects 2 inputs");
      const Node& a = node(in[0].id);
      const Node& b = node(in[1].id);
      const bool broadcast = (b.rows == 1 && a.rows != 1 && b.cols == a.cols);
      require(broadcast || (a.rows == b.rows && a.cols == b.cols),
              "add/subtract: shape mismatch");
      const double sgn = (op == Op::add) ? 1.0 : -1.0;
      std::vector<double> out(a.val.size());
      for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) {
          const std::size_t idx = static_cast<std::size_t>(i) * a.cols + j;
          const double bv = broadcast ? b.val[j] : b.val[idx];
          out[idx] = a.val[idx] + sgn * bv;
        }
      return push(op, a.rows, a.cols, in[0].id, in[1].id, attr, std::move(out),
                  a.needs_grad || b.needs_grad, -1);
    }

    case Op::multiply:
    case Op::divide:
    case Op::elementwise_min:
    case Op::elementwise_max: {
      require(in.size() == 2, "binary elementwise op expects 2 inputs");
      const Node& a = node(in[0].id);
      const Node& b = node(in[1].id);
      require(a.rows == b.rows && a.cols == b.cols, "elementwise op: shape mismatch");
      std::vector<double> out(a.val.size());
      for (std::size_t i = 0; i < out.size(); ++i) {
        switch (op) {
          case Op::multiply: out[i] = a.val[i] * b.val[i]; break;
          case Op::divide:
            if (std::abs(b.val[i]) < kDivideFloor)
              throw std::domain_error("divide: denominator below 1e-12 in magnitude");
            out[i] = a.val[i] / b.val[i];
            break;
          case Op::elementwise_min: out[i] = (a.val[i] <= b.val[i]) ? a.val[i] : b.val[i]; break;
          default: out[i] = (a.val[i] >= b.val[i]) ? a.val[i] : b.val[i]; break;
        }
      }
      return push(op, a.rows, a.cols, in[0].id, in[1].id, attr, std::move(out),
                  a.needs_grad || b.needs_grad, -1);
    }

    case Op::sigmoid:
      return unary([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    case Op::tanh:
      return unary([](double x) { return std::tanh(x); });
    case Op::relu:
    case Op::positive_part:
      return unary([](double x) { return x > 0.0 ? x : 0.0; });
    case Op::exp:
      return unary([](double x) { return std::exp(x); });
    case Op::negate:
      return unary([](double x) { return -x; });
    case Op::clamp_min:
      return unary([attr](double x) { return x < attr ? attr : x; });
    case Op::scale:
      return unary([attr](double x) { return x * attr; });
    case Op::add_scalar:
      return unary([attr](double x) { return x + attr; });

    case Op::row_sum:
    case Op::row_mean: {
      require(in.size() == 1, "row reduction expects 1 input");
      const Node& a = node(in[0].id);
      std::vector<double> out(a.rows, 0.0);
      for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += a.val[static_cast<std::size_t>(i) * a.cols + j];
        out[i] = (op == Op::row_mean) ? s / a.cols : s;
      }
      return push(op, a.rows, 1, in[0].id, -1, attr, std::move(out), a.needs_grad, -1);
    }

    case Op::column_max: {
      require(in.size() == 1, "column_max expects 1 input");
      const Node& a = node(in[0].id);
      require(a.rows >= 1, "column_max: empty input");
      std::vector<double> out(a.cols);
      std::vector<double> arg(a.cols, 0.0);
      for (int j = 0; j < a.cols; ++j) {
        double best = a.val[j];
        int best_row = 0;
        for (int i = 1; i < a.rows; ++i) {
          const double v = a.val[static_cast<std::size_t>(i) * a.cols + j];
          if (v > best) best = v, best_row = i;
        }
        out[j] = best;
        arg[j] = best_row;
      }
      return push(op, 1, a.cols, in[0].id, -1, attr, std::move(out), a.needs_grad, -1,
                  std::move(arg));
    }

    case Op::layer_norm: {
      require(in.size() == 1, "layer_norm expects 1 input");
      const Node& a = node(in[0].id);
      require(a.cols >= 1, "layer_norm: empty rows");
      const double eps = attr;
      std::vector<double> out(a.val.size());
      std::vector<double> aux(static_cast<std::size_t>(a.rows) * 2);
      for (int i = 0; i < a.rows; ++i) {
        const double* row = a.val.data() + static_cast<std::size_t>(i) * a.cols;
        double mean = 0.0;
        for (int j = 0; j < a.cols; ++j) mean += row[j];
        mean /= a.cols;
        double var = 0.0;
        for (int j = 0; j < a.cols; ++j) var += (row[j] - mean) * (row[j] - mean);
        var /= a.cols;
        const double inv = 1.0 / std::sqrt(var + eps);
        for (int j = 0; j < a.cols; ++j)
          out[static_cast<std::size_t>(i) * a.cols + j] = (row[j] - mean) * inv;
        aux[static_cast<std::size_t>(i) * 2] = mean;
        aux[static_cast<std::size_t>(i) * 2 + 1] = inv;
      }
      return push(op, a.rows, a.cols, in[0].id, -1, attr, std::move(out), a.needs_grad, -1,
                  std::move(aux));
    }
  }
  throw std::invalid_argument("apply: unknown primitive");
}

inline void Tape::backward(Tensor loss, ParamStore& store) {
  const Node& top = node(loss.id);
  if (top.rows != 1 || top.cols != 1)
    throw std::invalid_argument("backward: loss must be a scalar");

  std::vector<std::vector<double>> grads(nodes_.size());
  auto grad_of = [&](int id) -> std::vector<double>& {
    auto& g = grads[id];
    if (g.empty()) g.assign(nodes_[id].val.size(), 0.0);
    return g;
  };
  grad_of(loss.id)[0] = 1.0;

  for (int id = loss.id; id >= 0; --id) {
    const Node& n = nodes_[id];
    if (!n.needs_grad || grads[id].empty()) continue;
    const std::vector<double>& g = grads[id];

    switch (n.op) {
      case Op::leaf: {
        if (n.param >= 0) {
          auto& acc = store.at(n.param).grad;
          if (acc.size() != g.size())
            throw std::invalid_argument("backward: store does not match recorded leaf");
          for (std::size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
        }
        break;
      }
      case Op::matmul: {
        const Node& a = nodes_[n.in0];
        const Node& b = nodes_[n.in1];
        const int m = a.rows, k = a.cols, nn = b.cols;
        if (a.needs_grad) {
          auto& da = grad_of(n.in0);
          for (int i = 0; i < m; ++i)
            for (int kk = 0; kk < k; ++kk) {
              double s = 0.0;
              const double* grow = g.data() + static_cast<std::size_t>(i) * nn;
              const double* brow = b.val.data() + static_cast<std::size_t>(kk) * nn;
              for (int j = 0; j < nn; ++j) s += grow[j] * brow[j];
              da[static_cast<std::size_t>(i) * k + kk] += s;
            }
        }
        if (b.needs_grad) {
          auto& db = grad_of(n.in1);
          for (int kk = 0; kk < k; ++kk)
            for (int i = 0; i < m; ++i) {
              const double av = a.val[static_cast<std::size_t>(i) * k + kk];
              if (av == 0.0) continue;
              const double* grow = g.data() + static_cast<std::size_t>(i) * nn;
              double* drow = db.data() + static_cast<std::size_t>(kk) * nn;
              for (int j = 0; j < nn; ++j) drow[j] += av * grow[j];
            }
        }
        break;
      }
      case Op::add:
      case Op::subtract: {
        const Node& a = nodes_[n.in0];
        const Node& b = nodes_[n.in1];
        const double sgn = (n.op == Op::add) ? 1.0 : -1.0;
        if (a.needs_grad) {
          auto& da = grad_of(n.in0);
          for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i];
        }
        if (b.needs_grad) {
          auto& db = grad_of(n.in1);
          const bool broadcast = (b.rows == 1 && n.rows != 1);
          if (broadcast) {
            for (int i = 0; i < n.rows; ++i)
              for (int j = 0; j < n.cols; ++j)
                db[j] += sgn * g[static_cast<std::size_t>(i) * n.cols + j];
          } else {
            for (std::size_t i = 0; i < g.size(); ++i) db[i] += sgn * g[i];
          }
        }
        break;
      }
      case Op::multiply: {
        const Node& a = nodes_[n.in0];
        const Node& b = nodes_[n.in1];
        if (a.needs_grad) {
          auto& da = grad_of(n.in0);
          for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * b.val[i];
        }
        if (b.needs_grad) {
          auto& db = grad_of(n.in1);
          for (std::size_t i = 0; i < g.size(); ++i) db[i] += g[i] * a.val[i];
        }
        break;
      }
      case Op::divide: {
        const Node& a = nodes_[n.in0];
        const Node& b = nodes_[n.in1];
        if (a.needs_grad) {
          auto& da = grad_of(n.in0);
          for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] / b.val[i];
        }
        if (b.needs_grad) {
          auto& db = grad_of(n.in1);
          for (std::size_t i = 0; i < g.size(); ++i)
            db[i] -= g[i] * a.val[i] / (b.val[i] * b.val[i]);
        }
        break;
      }
      case Op::elementwise_min:
      case Op::elementwise_max: {
        const Node& a = nodes_[n.in0];
        const Node& b = nodes_[n.in1];
        for (std::size_t i = 0; i < g.size(); ++i) {
          // Ties route to the first input (lowest index).
          const bool first_wins = (n.op == Op::elementwise_min) ? (a.val[i] <= b.val[i])
                                                                : (a.val[i] >= b.val[i]);
          if (first_wins) {
            if (a.needs_grad) grad_of(n.in0)[i] += g[i];
          } else {
            if (b.needs_grad) grad_of(n.in1)[i] += g[i];
          }
        }
        break;
      }
      case Op::sigmoid: {
        auto& da = grad_of(n.in0);
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * n.val[i] * (1.0 - n.val[i]);
        break;
      }
      case Op::tanh: {
        auto& da = grad_of(n.in0);
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * (1.0 - n.val[i] * n.val[i]);
        break;
      }
      case Op::relu:
      case Op::positive_part: {
        const Node& a = nodes_[n.in0];
        auto& da = grad_of(n.in0);
        for (std::size_t i = 0; i < g.size(); ++i)
          if (a.val[i] > 0.0) da[i] += g[i];
        break;
      }
      case Op::exp: {
        auto& da = grad_of(n.in0);
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * n.val[i];
        break;
      }
      case Op::negate: {
        auto& da = grad_of(n.in0);
        for (std::size_t i = 0; i < g.size(); ++i) da[i] -= g[i];
        break;
      }
      case Op::clamp_min: {
        const Node& a = nodes_[n.in0];
        auto& da = grad_of(n.in0);
        for (std::size_t i = 0; i < g.size(); ++i)
          if (a.val[i] > n.attr) da[i] += g[i];
        break;
      }
      case Op::scale: {
        auto& da = grad_of(n.in0);
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * n.attr;
        break;
      }
      case Op::add_scalar: {
        auto& da = grad_of(n.in0);
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i];
        break;
      }
      case Op::row_sum:
      case Op::row_mean: {
        const Node& a = nodes_[n.in0];
        auto& da = grad_of(n.in0);
        const double f = (n.op == Op::row_mean) ? 1.0 / a.cols : 1.0;
        for (int i = 0; i < a.rows; ++i)
          for (int j = 0; j < a.cols; ++j)
            da[static_cast<std::size_t>(i) * a.cols + j] += g[i] * f;
        break;
      }
      case Op::column_max: {
        const Node& a = nodes_[n.in0];
        auto& da = grad_of(n.in0);
        for (int j = 0; j < n.cols; ++j) {
          const int row = static_cast<int>(n.aux[j]);
          da[static_cast<std::size_t>(row) * a.cols + j] += g[j];
        }
        break;
      }
      case Op::layer_norm: {
        const Node& a = nodes_[n.in0];
        auto& da = grad_of(n.in0);
        for (int i = 0; i < a.rows; ++i) {
          const std::size_t base = static_cast<std::size_t>(i) * a.cols;
          const double inv = n.aux[static_cast<std::size_t>(i) * 2 + 1];
          double mean_g = 0.0, mean_gy = 0.0;
          for (int j = 0; j < a.cols; ++j) {
            mean_g += g[base + j];
            mean_gy += g[base + j] * n.val[base + j];
          }
          mean_g /= a.cols;
          mean_gy /= a.cols;
          for (int j = 0; j < a.cols; ++j)
            da[base + j] += inv * (g[base + j] - mean_g - n.val[base + j] * mean_gy);
        }
        break;
      }
    }
  }
}

// Convenience wrappers; everything funnels through Tape::apply.
inline Tensor matmul(Tape& t, Tensor a, Tensor b) { return t.apply(Op::matmul, {a, b}); }
inline Tensor add(Tape& t, Tensor a, Tensor b) { return t.apply(Op::add, {a, b}); }
inline Tensor subtract(Tape& t, Tensor a, Tensor b) { return t.apply(Op::subtract, {a, b}); }
inline Tensor multiply(Tape& t, Tensor a, Tensor b) { return t.apply(Op::multiply, {a, b}); }
inline Tensor divide(Tape& t, Tensor a, Tensor b) { return t.apply(Op::divide, {a, b}); }
inline Tensor sigmoid(Tape& t, Tensor a) { return t.apply(Op::sigmoid, {a}); }
inline Tensor tanh(Tape& t, Tensor a) { return t.apply(Op::tanh, {a}); }
inline Tensor relu(Tape& t, Tensor a) { return t.apply(Op::relu, {a}); }
inline Tensor positive_part(Tape& t, Tensor a) { return t.apply(Op::positive_part, {a}); }
inline Tensor exp(Tape& t, Tensor a) { return t.apply(Op::exp, {a}); }
inline Tensor negate(Tape& t, Tensor a) { return t.apply(Op::negate, {a}); }
inline Tensor clamp_min(Tape& t, Tensor a, double c) { return t.apply(Op::clamp_min, {a}, c); }
inline Tensor elementwise_min(Tape& t, Tensor a, Tensor b) {
  return t.apply(Op::elementwise_min, {a, b});
}
inline Tensor elementwise_max(Tape& t, Tensor a, Tensor b) {
  return t.apply(Op::elementwise_max, {a, b});
}
inline Tensor row_sum(Tape& t, Tensor a) { return t.apply(Op::row_sum, {a}); }
inline Tensor row_mean(Tape& t, Tensor a) { return t.apply(Op::row_mean, {a}); }
inline Tensor column_max(Tape& t, Tensor a) { return t.apply(Op::column_max, {a}); }
inline Tensor layer_norm(Tape& t, Tensor a, double eps = 1e-5) {
  return t.apply(Op::layer_norm, {a}, eps);
}
inline Tensor scale(Tape& t, Tensor a, double f) { return t.apply(Op::scale, {a}, f); }
inline Tensor add_scalar(Tape& t, Tensor a, double c) { return t.apply(Op::add_scalar, {a}, c); }

// Central-difference check of the analytic gradient of `build` (a scalar loss
// recorded on a fresh tape from the store's parameters). Returns the maximum
// relative error over all parameter coordinates, using denominator
// max(1e-8, |analytic| + |numeric|).
inline double finite_difference_check(const std::function<Tensor(Tape&)>& build,
                                      ParamStore& store, double h = 1e-5) {
  store.zero_grad();
  std::vector<std::vector<double>> analytic;
  {
    Tape tape;
    Tensor loss = build(tape);
    tape.backward(loss, store);
  }
  for (const auto& p : store) analytic.push_back(p.grad);
  store.zero_grad();

  auto eval = [&]() {
    Tape tape;
    return tape.scalar_value(build(tape));
  };

  double max_rel = 0.0;
  int pi = 0;
  for (auto& p : store) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + h;
      const double fp = eval();
      p.value[i] = saved - h;
      const double fm = eval();
      p.value[i] = saved;
      const double numeric = (fp - fm) / (2.0 * h);
      const double a = analytic[pi][i];
      const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      max_rel = std::max(max_rel, rel);
    }
    ++pi;
  }
  return max_rel;
}

}  // namespace nsm::ad
