#include "tdlstm/cells.hpp"

#include <cmath>
#include <stdexcept>

#include "tdlstm/error.hpp"

namespace tdlstm {

namespace {

Parameter weight(const std::string& name, std::size_t rows, std::size_t cols, double bound,
                 std::mt19937_64& rng) {
  Tensor t = Tensor::matrix(rows, cols);
  fill_uniform(t, bound, rng);
  Parameter p(name, std::move(t));
  p.regularized = true;
  return p;
}

Parameter bias(const std::string& name, std::size_t n) {
  return Parameter(name, Tensor::vector(n));
}

// act(W x + U h + b); `wx_b` is the precomputed W x + b.
Var gate(Graph& g, Var wx_b, Parameter& u, Var h, bool candidate) {
  Var pre = g.add(wx_b, g.matvec(g.param(u), h));
  return candidate ? g.tanh(pre) : g.sigmoid(pre);
}

Var affine(Graph& g, Parameter& w, Var x, Parameter& b) {
  return g.add(g.matvec(g.param(w), x), g.param(b));
}

Var activate(Graph& g, Var pre, GateActivation a) {
  switch (a) {
    case GateActivation::sigmoid: return g.sigmoid(pre);
    case GateActivation::tanh: return g.tanh(pre);
    case GateActivation::relu: return g.relu(pre);
  }
  throw std::logic_error("unknown gate activation");
}

}  // namespace

std::string to_string(GateActivation a) {
  switch (a) {
    case GateActivation::sigmoid: return "sigmoid";
    case GateActivation::tanh: return "tanh";
    case GateActivation::relu: return "relu";
  }
  return "?";
}

GateActivation parse_gate_activation(const std::string& name) {
  if (name == "sigmoid") return GateActivation::sigmoid;
  if (name == "tanh") return GateActivation::tanh;
  if (name == "relu") return GateActivation::relu;
  throw std::invalid_argument("unknown gate activation '" + name + "'");
}

CellParams CellParams::create(std::size_t d, std::size_t e, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  return CellParams{
      weight("cell.w_i", d, e, bound, rng), weight("cell.u_i", d, d, bound, rng), bias("cell.b_i", d),
      weight("cell.w_f", d, e, bound, rng), weight("cell.u_f", d, d, bound, rng), bias("cell.b_f", d),
      weight("cell.w_o", d, e, bound, rng), weight("cell.u_o", d, d, bound, rng), bias("cell.b_o", d),
      weight("cell.w_u", d, e, bound, rng), weight("cell.u_u", d, d, bound, rng), bias("cell.b_u", d),
  };
}

std::vector<Parameter*> CellParams::parameters() {
  return {&w_i, &u_i, &b_i, &w_f, &u_f, &b_f, &w_o, &u_o, &b_o, &w_u, &u_u, &b_u};
}

std::vector<const Parameter*> CellParams::parameters() const {
  return {&w_i, &u_i, &b_i, &w_f, &u_f, &b_f, &w_o, &u_o, &b_o, &w_u, &u_u, &b_u};
}

RelationGateParams RelationGateParams::create(std::size_t d, std::size_t relations,
                                              GateActivation activation, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  return RelationGateParams{weight("gate.w_r", d, relations, bound, rng), bias("gate.b_r", d),
                            activation};
}

NodeState lstm_step(Graph& g, CellParams& p, Var x, Var h_prev, Var c_prev) {
  Var i = gate(g, affine(g, p.w_i, x, p.b_i), p.u_i, h_prev, false);
  Var f = gate(g, affine(g, p.w_f, x, p.b_f), p.u_f, h_prev, false);
  Var o = gate(g, affine(g, p.w_o, x, p.b_o), p.u_o, h_prev, false);
  Var u = gate(g, affine(g, p.w_u, x, p.b_u), p.u_u, h_prev, true);
  Var c = g.add(g.hadamard(i, u), g.hadamard(f, c_prev));
  return {c, g.hadamard(o, g.tanh(c))};
}

CellCore childsum_core(Graph& g, CellParams& p, Var x, std::span<const NodeState> children) {
  const std::size_t d = p.memory_dim();
  std::vector<Var> child_h;
  child_h.reserve(children.size());
  for (const auto& ch : children) child_h.push_back(ch.h);
  Var h_sum = children.empty() ? g.input(Tensor::vector(d)) : g.sum(child_h);

  Var i = gate(g, affine(g, p.w_i, x, p.b_i), p.u_i, h_sum, false);
  Var o = gate(g, affine(g, p.w_o, x, p.b_o), p.u_o, h_sum, false);
  Var u = gate(g, affine(g, p.w_u, x, p.b_u), p.u_u, h_sum, true);

  std::vector<Var> terms{g.hadamard(i, u)};
  if (!children.empty()) {
    Var wf = affine(g, p.w_f, x, p.b_f);
    for (const auto& ch : children) {
      Var f = gate(g, wf, p.u_f, ch.h, false);
      terms.push_back(g.hadamard(f, ch.c));
    }
  }
  Var c = terms.size() == 1 ? terms[0] : g.sum(terms);
  return {o, c};
}

NodeState childsum_step(Graph& g, CellParams& p, Var x, std::span<const NodeState> children) {
  CellCore core = childsum_core(g, p, x, children);
  return {core.c, g.hadamard(core.o, g.tanh(core.c))};
}

Var relation_gate(Graph& g, RelationGateParams& rp, std::size_t relation) {
  if (relation >= rp.w.value.cols()) {
    throw std::invalid_argument("relation index " + std::to_string(relation) + " outside " +
                                std::to_string(rp.w.value.cols()) + " relations");
  }
  Var column = g.column(g.param(rp.w), relation);
  return activate(g, g.add(column, g.param(rp.b)), rp.activation);
}

std::size_t one_hot_index(const Tensor& one_hot) {
  std::size_t hot = one_hot.size();
  for (std::size_t i = 0; i < one_hot.size(); ++i) {
    if (one_hot[i] == 1.0 && hot == one_hot.size()) {
      hot = i;
    } else if (one_hot[i] != 0.0) {
      throw std::invalid_argument("relation vector is not one-hot");
    }
  }
  if (hot == one_hot.size()) throw std::invalid_argument("relation vector is not one-hot");
  return hot;
}

Var relation_gate(Graph& g, RelationGateParams& rp, const Tensor& one_hot) {
  if (one_hot.size() != rp.w.value.cols()) {
    throw DimensionError("relation vector of size " + std::to_string(one_hot.size()) + " for " +
                         std::to_string(rp.w.value.cols()) + " relations");
  }
  return relation_gate(g, rp, one_hot_index(one_hot));
}

NodeState typed_childsum_step(Graph& g, CellParams& p, RelationGateParams& rp, Var x,
                              std::size_t relation, std::span<const NodeState> children,
                              const Tensor* gate_override) {
  CellCore core = childsum_core(g, p, x, children);
  Var r = gate_override ? g.input(*gate_override) : relation_gate(g, rp, relation);
  return {core.c, g.hadamard(core.o, g.tanh(g.hadamard(core.c, r)))};
}

std::vector<Var> multi_parent_hidden(Graph& g, RelationGateParams& rp, const CellCore& core,
                                     std::span<const std::size_t> relations) {
  if (relations.empty()) throw std::invalid_argument("multi_parent_hidden: no parent relations");
  std::vector<Var> out;
  out.reserve(relations.size());
  for (std::size_t rel : relations) {
    Var r = relation_gate(g, rp, rel);
    out.push_back(g.hadamard(core.o, g.tanh(g.hadamard(core.c, r))));
  }
  return out;
}

}  // namespace tdlstm
