#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tdlstm/dep_tree.hpp"
#include "tdlstm/grad_check.hpp"

namespace tdlstm {

// Random valid dependency tree over n tokens. Forms are drawn from `words`
// and non-root relations from `relations`.
DepTree random_dep_tree(std::size_t n, std::mt19937_64& rng, std::span<const std::string> words,
                        std::span<const std::string> relations);

struct ModelGradCheckOptions {
  std::size_t memory_dim = 8;
  std::size_t embedding_dim = 10;
  std::size_t hidden_dim = 8;
  std::size_t classes = 5;
  std::size_t tree_size = 5;
  std::uint64_t seed = 1;
  // Large enough that lambda * w of untouched gate columns stays far above
  // central-difference roundoff of an O(1) loss.
  double weight_decay = 1e-2;
  GradCheckOptions check;
};

struct ModelGradCheckReport {
  GradCheckReport relatedness;
  GradCheckReport sentiment;
  double max_relative_error() const {
    return std::max(relatedness.max_relative_error, sentiment.max_relative_error);
  }
};

// Full typed model with every weight, bias and embedding drawn from
// uniform(-0.5, 0.5): the relatedness loss on a pair of random trees and the
// sentiment loss on labeled nodes of one tree, each checked against central
// differences over the cell, gate, head and embedding parameters.
ModelGradCheckReport model_grad_check(const ModelGradCheckOptions& options = {});

}  // namespace tdlstm
