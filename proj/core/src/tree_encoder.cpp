#include "tdlstm/tree_encoder.hpp"

#include <algorithm>

namespace tdlstm {

TreeEncoding encode_tree(Graph& g, CellParams& cell, RelationGateParams& gate,
                         const DepTree& tree, EmbeddingTable& embeddings,
                         const RelationInventory& inventory, const EncoderOptions& options) {
  TreeEncoding out;
  out.states.resize(tree.size());
  std::vector<NodeState> kids;
  for (std::size_t node : tree.post_order()) {
    const DepToken& tok = tree.token(node);
    Var x = g.lookup(embeddings.parameter(), embeddings.row(tok.form), options.train_embeddings);

    std::vector<std::size_t> order = tree.children(node);
    if (options.canonical_child_order) std::sort(order.begin(), order.end());
    kids.clear();
    for (std::size_t child : order) kids.push_back(out.states[child - 1]);

    if (options.typed) {
      const std::size_t relation =
          tok.head == 0 ? inventory.root_index() : inventory.index_of(tok.deprel);
      out.states[node - 1] =
          typed_childsum_step(g, cell, gate, x, relation, kids, options.gate_override);
    } else {
      out.states[node - 1] = childsum_step(g, cell, x, kids);
    }
  }
  out.sentence = out.states[tree.root() - 1].h;
  return out;
}

}  // namespace tdlstm
