#pragma once

#include <vector>

#include "tdlstm/cells.hpp"
#include "tdlstm/dep_tree.hpp"
#include "tdlstm/embeddings.hpp"
#include "tdlstm/relation_inventory.hpp"

namespace tdlstm {

struct EncoderOptions {
  // false runs the plain child-sum cell everywhere (the untyped baseline).
  bool typed = true;
  // Gradients flow into the embedding table.
  bool train_embeddings = false;
  // Visit children in ascending token order, fixing the floating-point
  // reduction order of every child sum.
  bool canonical_child_order = true;
  // Replaces every relation gate output (tests only).
  const Tensor* gate_override = nullptr;
};

struct TreeEncoding {
  std::vector<NodeState> states;  // indexed by token index - 1
  Var sentence;                   // hidden state of the root word
};

// Post-order encoding. Node t is gated by the relation to its head; the root
// word always uses the "root" slot.
TreeEncoding encode_tree(Graph& g, CellParams& cell, RelationGateParams& gate,
                         const DepTree& tree, EmbeddingTable& embeddings,
                         const RelationInventory& inventory, const EncoderOptions& options = {});

}  // namespace tdlstm
