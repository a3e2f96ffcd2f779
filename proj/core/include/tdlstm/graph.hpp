#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tdlstm/tensor.hpp"

namespace tdlstm {

// Handle to a node recorded on a Graph.
struct Var {
  std::uint32_t id = 0;
};

enum class ElementOp { add, hadamard, sigmoid, tanh, abs_diff, scale };

// Reverse-mode tape. A Graph is built fresh for every example: nodes are
// appended in execution order and backward() walks them in exact reverse.
//
// Parameters enter the graph by reference; their values are read, never
// written. Gradients land in per-graph buffers and are added into
// Parameter::grad by flush_parameter_grads(), so several graphs may run
// concurrently over the same parameters as long as flushes are serialized.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;
  Graph(Graph&&) = default;
  Graph& operator=(Graph&&) = default;

  Var input(Tensor value);
  Var scalar_input(double value) { return input(Tensor({1}, {value})); }
  // At most one node per parameter per graph.
  Var param(Parameter& p);
  // Row `row` of a matrix parameter as a vector. With requires_grad false the
  // row is treated as a constant.
  Var lookup(Parameter& table, std::size_t row, bool requires_grad);
  // Column `col` of a matrix node (one-hot product without the dense matvec).
  Var column(Var matrix, std::size_t col);

  Var matvec(Var matrix, Var x);
  Var add(Var a, Var b);
  Var sum(std::span<const Var> terms);
  Var hadamard(Var a, Var b);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  Var abs_diff(Var a, Var b);
  Var scale(Var a, double factor);
  Var elementwise(ElementOp op, std::span<const Var> args, double factor = 1.0);

  Var softmax(Var logits);
  // Scalar KL(target || q). Terms with target_i = 0 are skipped.
  Var kl_divergence(const Tensor& target, Var q);
  // Scalar -log q[index].
  Var neg_log_pick(Var q, std::size_t index);
  // Scalar weights . a for a constant weight vector.
  Var dot_const(const Tensor& weights, Var a);
  // Scalar sum of squared entries.
  Var sum_squares(Var a);

  const Tensor& value(Var v) const;
  double scalar(Var v) const { return value(v)[0]; }
  // Valid after backward().
  const Tensor& gradient(Var v) const;

  // Seeds d(loss)/d(loss) = 1 and propagates. With flush = true the parameter
  // gradients are immediately added into Parameter::grad.
  void backward(Var loss, bool flush = true);
  void flush_parameter_grads();

  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op : std::uint8_t {
    input, param, lookup, column, matvec, add, sum, hadamard, sigmoid, tanh, relu,
    abs_diff, scale, softmax, kl, neg_log_pick, dot_const, sum_squares
  };

  struct Node {
    Op op = Op::input;
    std::vector<std::uint32_t> inputs;
    Tensor value;  // empty for param nodes; they read Parameter::value
    Tensor grad;
    Tensor constant;  // kl target / dot weights
    Parameter* param = nullptr;
    std::size_t index = 0;
    double factor = 0.0;
    bool requires_grad = false;
  };

  Var push(Node node);
  const Node& node(Var v) const { return nodes_.at(v.id); }
  void require_same_shape(const char* op, Var a, Var b) const;
  void require_vector(const char* op, Var a) const;
  void propagate(std::uint32_t id);

  std::vector<Node> nodes_;
  std::vector<std::pair<Parameter*, std::uint32_t>> param_nodes_;
  bool has_gradients_ = false;
};

}  // namespace tdlstm
