#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tdlstm/graph.hpp"
#include "tdlstm/tensor.hpp"

namespace tdlstm {

enum class GateActivation { sigmoid, tanh, relu };

std::string to_string(GateActivation g);
GateActivation parse_gate_activation(const std::string& name);

// Input, forget, output and candidate transforms shared by every node.
struct CellParams {
  Parameter w_i, u_i, b_i;
  Parameter w_f, u_f, b_f;
  Parameter w_o, u_o, b_o;
  Parameter w_u, u_u, b_u;

  // Matrices uniform(-1/sqrt(d), 1/sqrt(d)), biases zero.
  static CellParams create(std::size_t memory_dim, std::size_t input_dim, std::mt19937_64& rng);

  std::size_t memory_dim() const { return b_i.value.size(); }
  std::size_t input_dim() const { return w_i.value.cols(); }
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
};

// r = g(W z + b). Column j of `w` is the embedding of relation j.
struct RelationGateParams {
  Parameter w;  // memory_dim x relations
  Parameter b;
  GateActivation activation = GateActivation::sigmoid;

  static RelationGateParams create(std::size_t memory_dim, std::size_t relations,
                                   GateActivation activation, std::mt19937_64& rng);
  std::vector<Parameter*> parameters() { return {&w, &b}; }
};

struct NodeState {
  Var c;
  Var h;
};

// Output gate and cell state of a child-sum node, before the hidden state is
// formed.
struct CellCore {
  Var o;
  Var c;
};

// Sequential LSTM transition.
NodeState lstm_step(Graph& g, CellParams& p, Var x, Var h_prev, Var c_prev);

// Child-sum transition up to the cell state: i, o, u read the summed child
// hidden state; each child gets its own forget gate.
CellCore childsum_core(Graph& g, CellParams& p, Var x, std::span<const NodeState> children);

// Dependency Tree-LSTM node: h = o * tanh(c).
NodeState childsum_step(Graph& g, CellParams& p, Var x, std::span<const NodeState> children);

// Gate vector for relation index `relation` (a column select).
Var relation_gate(Graph& g, RelationGateParams& rp, std::size_t relation);
// Same, from an explicit one-hot vector. Throws std::invalid_argument unless
// `one_hot` has exactly one entry equal to 1 and the rest 0.
Var relation_gate(Graph& g, RelationGateParams& rp, const Tensor& one_hot);
std::size_t one_hot_index(const Tensor& one_hot);

// Typed node: c as in childsum_step, h = o * tanh(c * r). A non-null
// `gate_override` replaces r with that constant vector (tests only).
NodeState typed_childsum_step(Graph& g, CellParams& p, RelationGateParams& rp, Var x,
                              std::size_t relation, std::span<const NodeState> children,
                              const Tensor* gate_override = nullptr);

// One hidden state per parent relation, all through the same gate weights.
std::vector<Var> multi_parent_hidden(Graph& g, RelationGateParams& rp, const CellCore& core,
                                     std::span<const std::size_t> relations);

}  // namespace tdlstm
