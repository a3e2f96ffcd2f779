#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tdlstm {

// Lowercases, folds passive subtypes (nsubj:pass -> nsubjpass) and strips any
// remaining ":subtype" suffix.
std::string normalize_deprel(std::string_view raw);

// Ordered set of typed-dependency labels, each owning one one-hot slot.
class RelationInventory {
 public:
  // The 47-slot inventory: 40 UD v1 relations, 6 UD v2 additions, "unk".
  static const RelationInventory& universal();

  // Labels must be unique and include "root" and "unk".
  explicit RelationInventory(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const { return labels_; }

  // Exact label lookup.
  std::optional<std::size_t> find(std::string_view label) const;
  // Normalized lookup; anything unknown lands in the "unk" slot.
  std::size_t index_of(std::string_view raw_label) const;

  std::size_t root_index() const { return root_; }
  std::size_t unk_index() const { return unk_; }

  friend bool operator==(const RelationInventory& a, const RelationInventory& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t root_ = 0;
  std::size_t unk_ = 0;
};

}  // namespace tdlstm
