#include "tdlstm/dep_tree.hpp"

#include <algorithm>
#include <string>

#include "tdlstm/error.hpp"

namespace tdlstm {

DepTree DepTree::build(std::vector<DepToken> tokens, std::span<const std::size_t> lines) {
  const std::size_t n = tokens.size();
  // Throws ParseError when source lines are known, DataError otherwise.
  auto fail = [&](std::size_t pos, const std::string& what) {
    if (pos < lines.size()) throw ParseError(lines[pos], what);
    throw DataError("token " + std::to_string(pos + 1) + ": " + what);
  };
  if (n == 0) throw DataError("empty sentence");

  DepTree tree;
  tree.children_.assign(n, {});
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const DepToken& t = tokens[i];
    if (t.index != i + 1) {
      fail(i, "token index " + std::to_string(t.index) + " out of sequence, expected " +
                        std::to_string(i + 1));
    }
    if (t.head > n) {
      fail(i, "head " + std::to_string(t.head) + " out of range 0.." + std::to_string(n));
    }
    if (t.head == t.index) fail(i, "token is its own head");
    if (t.head == 0) {
      ++roots;
      if (roots > 1) fail(i, "multiple roots");
      tree.root_ = t.index;
    } else {
      tree.children_[t.head - 1].push_back(t.index);
    }
  }
  // Every token must reach ROOT within n steps. Checked before the root
  // count so that a rootless block made of a cycle is reported as a cycle.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = tokens[i].index;
    std::size_t steps = 0;
    while (cur != 0 && steps <= n) {
      cur = tokens[cur - 1].head;
      ++steps;
    }
    if (cur != 0) fail(i, "cycle in head links");
  }
  if (roots == 0) fail(n - 1, "no token attaches to ROOT");
  tree.tokens_ = std::move(tokens);
  return tree;
}

std::vector<std::size_t> DepTree::post_order() const {
  std::vector<std::size_t> order;
  order.reserve(size());
  if (size() == 0) return order;
  // (node, next child position)
  std::vector<std::pair<std::size_t, std::size_t>> stack{{root_, 0}};
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    const auto& kids = children(node);
    if (next < kids.size()) {
      const std::size_t child = kids[next++];
      stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

void DepTree::reorder_children(std::size_t index, std::vector<std::size_t> order) {
  auto& current = children_.at(index - 1);
  std::vector<std::size_t> a = current;
  std::vector<std::size_t> b = order;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) {
    throw std::invalid_argument("reorder_children: not a permutation of the children of " +
                                std::to_string(index));
  }
  current = std::move(order);
}

std::vector<std::string> DepTree::forms() const {
  std::vector<std::string> out;
  out.reserve(tokens_.size());
  for (const auto& t : tokens_) out.push_back(t.form);
  return out;
}

std::vector<std::size_t> subtree_span(const DepTree& tree, std::size_t index) {
  std::vector<std::size_t> span;
  std::vector<std::size_t> stack{index};
  while (!stack.empty()) {
    const std::size_t node = stack.back();
    stack.pop_back();
    span.push_back(node);
    for (std::size_t child : tree.children(node)) stack.push_back(child);
  }
  std::sort(span.begin(), span.end());
  return span;
}

}  // namespace tdlstm
