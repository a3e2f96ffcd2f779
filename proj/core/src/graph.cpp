#include "tdlstm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tdlstm/error.hpp"

namespace tdlstm {

namespace {

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  has_gradients_ = false;
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Tensor& Graph::value(Var v) const {
  const Node& n = node(v);
  return n.op == Op::param ? n.param->value : n.value;
}

const Tensor& Graph::gradient(Var v) const {
  if (!has_gradients_) throw std::logic_error("gradient() requested before backward()");
  return node(v).grad;
}

void Graph::require_same_shape(const char* op, Var a, Var b) const {
  const auto& sa = value(a).shape();
  const auto& sb = value(b).shape();
  if (sa != sb) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(sa) + " vs " +
                         shape_string(sb));
  }
}

void Graph::require_vector(const char* op, Var a) const {
  if (value(a).rank() != 1) {
    throw DimensionError(std::string(op) + ": expected a vector, got " +
                         shape_string(value(a).shape()));
  }
}

Var Graph::input(Tensor v) {
  Node n;
  n.op = Op::input;
  n.value = std::move(v);
  return push(std::move(n));
}

Var Graph::param(Parameter& p) {
  for (const auto& [ptr, id] : param_nodes_) {
    if (ptr == &p) return Var{id};
  }
  Node n;
  n.op = Op::param;
  n.param = &p;
  n.requires_grad = true;
  Var v = push(std::move(n));
  param_nodes_.emplace_back(&p, v.id);
  return v;
}

Var Graph::lookup(Parameter& table, std::size_t row, bool requires_grad) {
  const Tensor& t = table.value;
  if (t.rank() != 2 || row >= t.rows()) {
    throw DimensionError("lookup: row " + std::to_string(row) + " outside " +
                         shape_string(t.shape()));
  }
  Node n;
  n.op = Op::lookup;
  n.param = &table;
  n.index = row;
  n.requires_grad = requires_grad;
  n.value = Tensor::vector(t.cols());
  std::copy_n(t.values().begin() + static_cast<std::ptrdiff_t>(row * t.cols()), t.cols(),
              n.value.values().begin());
  return push(std::move(n));
}

Var Graph::column(Var matrix, std::size_t col) {
  const Tensor& m = value(matrix);
  if (m.rank() != 2 || col >= m.cols()) {
    throw DimensionError("column: index " + std::to_string(col) + " outside " +
                         shape_string(m.shape()));
  }
  Node n;
  n.op = Op::column;
  n.inputs = {matrix.id};
  n.index = col;
  n.requires_grad = node(matrix).requires_grad;
  n.value = Tensor::vector(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) n.value[r] = m.at(r, col);
  return push(std::move(n));
}

Var Graph::matvec(Var matrix, Var x) {
  const Tensor& w = value(matrix);
  const Tensor& xv = value(x);
  if (w.rank() != 2 || xv.rank() != 1 || w.cols() != xv.size()) {
    throw DimensionError("matvec: shape mismatch " + shape_string(w.shape()) + " * " +
                         shape_string(xv.shape()));
  }
  Node n;
  n.op = Op::matvec;
  n.inputs = {matrix.id, x.id};
  n.requires_grad = node(matrix).requires_grad || node(x).requires_grad;
  n.value = Tensor::vector(w.rows());
  const std::size_t cols = w.cols();
  const double* wp = w.values().data();
  const double* xp = xv.values().data();
  for (std::size_t r = 0; r < w.rows(); ++r) {
    double acc = 0.0;
    const double* row = wp + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * xp[c];
    n.value[r] = acc;
  }
  return push(std::move(n));
}

Var Graph::add(Var a, Var b) {
  require_same_shape("add", a, b);
  Node n;
  n.op = Op::add;
  n.inputs = {a.id, b.id};
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = value(a);
  const Tensor& bv = value(b);
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value[i] += bv[i];
  return push(std::move(n));
}

Var Graph::sum(std::span<const Var> terms) {
  if (terms.empty()) throw DimensionError("sum: no terms");
  Node n;
  n.op = Op::sum;
  n.value = value(terms[0]);
  n.inputs.push_back(terms[0].id);
  n.requires_grad = node(terms[0]).requires_grad;
  for (std::size_t k = 1; k < terms.size(); ++k) {
    require_same_shape("sum", terms[0], terms[k]);
    const Tensor& t = value(terms[k]);
    for (std::size_t i = 0; i < n.value.size(); ++i) n.value[i] += t[i];
    n.inputs.push_back(terms[k].id);
    n.requires_grad = n.requires_grad || node(terms[k]).requires_grad;
  }
  return push(std::move(n));
}

Var Graph::hadamard(Var a, Var b) {
  require_same_shape("hadamard", a, b);
  Node n;
  n.op = Op::hadamard;
  n.inputs = {a.id, b.id};
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = value(a);
  const Tensor& bv = value(b);
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value[i] *= bv[i];
  return push(std::move(n));
}

Var Graph::sigmoid(Var a) {
  Node n;
  n.op = Op::sigmoid;
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  n.value = value(a);
  for (auto& x : n.value.values()) x = logistic(x);
  return push(std::move(n));
}

Var Graph::tanh(Var a) {
  Node n;
  n.op = Op::tanh;
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  n.value = value(a);
  for (auto& x : n.value.values()) x = std::tanh(x);
  return push(std::move(n));
}

Var Graph::relu(Var a) {
  Node n;
  n.op = Op::relu;
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  n.value = value(a);
  for (auto& x : n.value.values()) x = x > 0.0 ? x : 0.0;
  return push(std::move(n));
}

Var Graph::abs_diff(Var a, Var b) {
  require_same_shape("abs_diff", a, b);
  Node n;
  n.op = Op::abs_diff;
  n.inputs = {a.id, b.id};
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  n.value = value(a);
  const Tensor& bv = value(b);
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value[i] = std::abs(n.value[i] - bv[i]);
  return push(std::move(n));
}

Var Graph::scale(Var a, double factor) {
  Node n;
  n.op = Op::scale;
  n.inputs = {a.id};
  n.factor = factor;
  n.requires_grad = node(a).requires_grad;
  n.value = value(a);
  for (auto& x : n.value.values()) x *= factor;
  return push(std::move(n));
}

Var Graph::elementwise(ElementOp op, std::span<const Var> args, double factor) {
  auto arity = [&](std::size_t want) {
    if (args.size() != want) {
      throw DimensionError("elementwise: expected " + std::to_string(want) + " arguments, got " +
                           std::to_string(args.size()));
    }
  };
  switch (op) {
    case ElementOp::add: arity(2); return add(args[0], args[1]);
    case ElementOp::hadamard: arity(2); return hadamard(args[0], args[1]);
    case ElementOp::abs_diff: arity(2); return abs_diff(args[0], args[1]);
    case ElementOp::sigmoid: arity(1); return sigmoid(args[0]);
    case ElementOp::tanh: arity(1); return tanh(args[0]);
    case ElementOp::scale: arity(1); return scale(args[0], factor);
  }
  throw std::logic_error("elementwise: unknown op");
}

Var Graph::softmax(Var logits) {
  require_vector("softmax", logits);
  Node n;
  n.op = Op::softmax;
  n.inputs = {logits.id};
  n.requires_grad = node(logits).requires_grad;
  n.value = Tensor(value(logits).shape(), tdlstm::softmax(value(logits).span()));
  return push(std::move(n));
}

Var Graph::kl_divergence(const Tensor& target, Var q) {
  Node n;
  n.op = Op::kl;
  n.inputs = {q.id};
  n.requires_grad = node(q).requires_grad;
  n.constant = target;
  n.value = Tensor({1}, {tdlstm::kl_divergence(target.span(), value(q).span())});
  return push(std::move(n));
}

Var Graph::neg_log_pick(Var q, std::size_t index) {
  require_vector("neg_log_pick", q);
  const Tensor& qv = value(q);
  if (index >= qv.size()) {
    throw DimensionError("neg_log_pick: index " + std::to_string(index) + " outside " +
                         shape_string(qv.shape()));
  }
  if (qv[index] <= 0.0) throw NumericError("neg_log_pick: zero probability for true class");
  Node n;
  n.op = Op::neg_log_pick;
  n.inputs = {q.id};
  n.index = index;
  n.requires_grad = node(q).requires_grad;
  n.value = Tensor({1}, {-std::log(qv[index])});
  return push(std::move(n));
}

Var Graph::dot_const(const Tensor& weights, Var a) {
  const Tensor& av = value(a);
  if (weights.size() != av.size()) {
    throw DimensionError("dot_const: shape mismatch " + shape_string(weights.shape()) + " . " +
                         shape_string(av.shape()));
  }
  Node n;
  n.op = Op::dot_const;
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  n.constant = weights;
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += weights[i] * av[i];
  n.value = Tensor({1}, {acc});
  return push(std::move(n));
}

Var Graph::sum_squares(Var a) {
  Node n;
  n.op = Op::sum_squares;
  n.inputs = {a.id};
  n.requires_grad = node(a).requires_grad;
  double acc = 0.0;
  for (double x : value(a).values()) acc += x * x;
  n.value = Tensor({1}, {acc});
  return push(std::move(n));
}

void Graph::backward(Var loss, bool flush) {
  if (value(loss).size() != 1) {
    throw DimensionError("backward: loss must be scalar, got " +
                         shape_string(value(loss).shape()));
  }
  for (auto& n : nodes_) {
    n.grad = Tensor(n.op == Op::param ? n.param->value.shape() : n.value.shape());
  }
  has_gradients_ = true;
  nodes_[loss.id].grad[0] = 1.0;
  for (std::uint32_t id = loss.id + 1; id-- > 0;) propagate(id);
  if (flush) flush_parameter_grads();
}

void Graph::flush_parameter_grads() {
  if (!has_gradients_) return;
  for (auto& n : nodes_) {
    if (n.op == Op::param) {
      auto& dst = n.param->grad.values();
      const auto& src = n.grad.values();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    } else if (n.op == Op::lookup && n.requires_grad) {
      const std::size_t cols = n.param->value.cols();
      double* dst = n.param->grad.values().data() + n.index * cols;
      for (std::size_t i = 0; i < cols; ++i) dst[i] += n.grad[i];
    }
  }
}

void Graph::propagate(std::uint32_t id) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  const Tensor& g = n.grad;
  auto wants = [&](std::size_t k) { return nodes_[n.inputs[k]].requires_grad; };
  auto grad_of = [&](std::size_t k) -> Tensor& { return nodes_[n.inputs[k]].grad; };

  switch (n.op) {
    case Op::input:
    case Op::param:
    case Op::lookup:
      break;
    case Op::column: {
      Tensor& gm = grad_of(0);
      for (std::size_t r = 0; r < g.size(); ++r) gm.at(r, n.index) += g[r];
      break;
    }
    case Op::matvec: {
      const Tensor& w = value(Var{n.inputs[0]});
      const Tensor& x = value(Var{n.inputs[1]});
      const std::size_t cols = w.cols();
      if (wants(0)) {
        double* gw = grad_of(0).values().data();
        for (std::size_t r = 0; r < w.rows(); ++r) {
          const double gr = g[r];
          if (gr == 0.0) continue;
          double* row = gw + r * cols;
          for (std::size_t c = 0; c < cols; ++c) row[c] += gr * x[c];
        }
      }
      if (wants(1)) {
        double* gx = grad_of(1).values().data();
        const double* wp = w.values().data();
        for (std::size_t r = 0; r < w.rows(); ++r) {
          const double gr = g[r];
          const double* row = wp + r * cols;
          for (std::size_t c = 0; c < cols; ++c) gx[c] += row[c] * gr;
        }
      }
      break;
    }
    case Op::add:
    case Op::sum:
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        if (!wants(k)) continue;
        Tensor& gi = grad_of(k);
        for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i];
      }
      break;
    case Op::hadamard: {
      const Tensor& a = value(Var{n.inputs[0]});
      const Tensor& b = value(Var{n.inputs[1]});
      if (wants(0)) {
        Tensor& ga = grad_of(0);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b[i];
      }
      if (wants(1)) {
        Tensor& gb = grad_of(1);
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a[i];
      }
      break;
    }
    case Op::sigmoid: {
      Tensor& ga = grad_of(0);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.value[i] * (1.0 - n.value[i]);
      break;
    }
    case Op::tanh: {
      Tensor& ga = grad_of(0);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - n.value[i] * n.value[i]);
      break;
    }
    case Op::relu: {
      Tensor& ga = grad_of(0);
      const Tensor& a = value(Var{n.inputs[0]});
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += a[i] > 0.0 ? g[i] : 0.0;
      break;
    }
    case Op::abs_diff: {
      const Tensor& a = value(Var{n.inputs[0]});
      const Tensor& b = value(Var{n.inputs[1]});
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = a[i] - b[i];
        const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        if (wants(0)) grad_of(0)[i] += g[i] * s;
        if (wants(1)) grad_of(1)[i] -= g[i] * s;
      }
      break;
    }
    case Op::scale: {
      Tensor& ga = grad_of(0);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * n.factor;
      break;
    }
    case Op::softmax: {
      Tensor& ga = grad_of(0);
      double inner = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) inner += g[i] * n.value[i];
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += n.value[i] * (g[i] - inner);
      break;
    }
    case Op::kl: {
      Tensor& gq = grad_of(0);
      const Tensor& q = value(Var{n.inputs[0]});
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (n.constant[i] == 0.0) continue;
        gq[i] -= g[0] * n.constant[i] / q[i];
      }
      break;
    }
    case Op::neg_log_pick: {
      const Tensor& q = value(Var{n.inputs[0]});
      grad_of(0)[n.index] -= g[0] / q[n.index];
      break;
    }
    case Op::dot_const: {
      Tensor& ga = grad_of(0);
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[0] * n.constant[i];
      break;
    }
    case Op::sum_squares: {
      Tensor& ga = grad_of(0);
      const Tensor& a = value(Var{n.inputs[0]});
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += 2.0 * g[0] * a[i];
      break;
    }
  }
}

}  // namespace tdlstm
