#include "tdlstm/relation_inventory.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace tdlstm {

std::string normalize_deprel(std::string_view raw) {
  std::string label(raw);
  std::transform(label.begin(), label.end(), label.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (label == "nsubj:pass") return "nsubjpass";
  if (label == "csubj:pass") return "csubjpass";
  if (label == "aux:pass") return "auxpass";
  if (auto colon = label.find(':'); colon != std::string::npos) label.resize(colon);
  return label;
}

const RelationInventory& RelationInventory::universal() {
  static const RelationInventory inventory({
      // UD v1
      "acl", "advcl", "advmod", "amod", "appos", "aux", "auxpass", "case", "cc", "ccomp",
      "compound", "conj", "cop", "csubj", "csubjpass", "dep", "det", "discourse", "dislocated",
      "dobj", "expl", "foreign", "goeswith", "iobj", "list", "mark", "mwe", "name", "neg",
      "nmod", "nsubj", "nsubjpass", "nummod", "parataxis", "punct", "remnant", "reparandum",
      "root", "vocative", "xcomp",
      // UD v2 base types absent from v1
      "clf", "fixed", "flat", "obj", "obl", "orphan",
      "unk",
  });
  return inventory;
}

RelationInventory::RelationInventory(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], i).second) {
      throw std::invalid_argument("relation inventory: duplicate label '" + labels_[i] + "'");
    }
  }
  auto root = find("root");
  auto unk = find("unk");
  if (!root || !unk) {
    throw std::invalid_argument("relation inventory must contain 'root' and 'unk'");
  }
  root_ = *root;
  unk_ = *unk;
}

std::optional<std::size_t> RelationInventory::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t RelationInventory::index_of(std::string_view raw_label) const {
  if (auto exact = find(raw_label)) return *exact;
  return find(normalize_deprel(raw_label)).value_or(unk_);
}

}  // namespace tdlstm
