#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace tdlstm {

struct DepToken {
  std::size_t index = 0;  // 1-based position
  std::string form;
  std::size_t head = 0;  // 0 = ROOT
  std::string deprel;

  friend bool operator==(const DepToken&, const DepToken&) = default;
};

// A validated dependency tree: exactly one token attaches to ROOT and the
// head links form a connected acyclic graph over tokens 1..n.
class DepTree {
 public:
  DepTree() = default;

  // Validates and indexes `tokens` (which must be numbered 1..n in order).
  // `lines`, when given, holds the source line of each token and is used in
  // error messages; otherwise token indices are reported.
  static DepTree build(std::vector<DepToken> tokens, std::span<const std::size_t> lines = {});

  std::size_t size() const { return tokens_.size(); }
  const std::vector<DepToken>& tokens() const { return tokens_; }
  const DepToken& token(std::size_t index) const { return tokens_.at(index - 1); }
  const std::vector<std::size_t>& children(std::size_t index) const {
    return children_.at(index - 1);
  }
  std::size_t root() const { return root_; }

  // Children before parents; siblings in child-list order.
  std::vector<std::size_t> post_order() const;

  // Reorders the child list of `index`; `order` must be a permutation of it.
  void reorder_children(std::size_t index, std::vector<std::size_t> order);

  std::vector<std::string> forms() const;

  // "# key = value" comment lines carried with the sentence.
  std::map<std::string, std::string> metadata;

 private:
  std::vector<DepToken> tokens_;
  std::vector<std::vector<std::size_t>> children_;
  std::size_t root_ = 0;
};

// Token indices of the subtree rooted at `index`, ascending.
std::vector<std::size_t> subtree_span(const DepTree& tree, std::size_t index);

}  // namespace tdlstm
