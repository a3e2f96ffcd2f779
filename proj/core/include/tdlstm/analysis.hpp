#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tdlstm/dep_tree.hpp"
#include "tdlstm/embeddings.hpp"
#include "tdlstm/model.hpp"

namespace tdlstm {

struct RelationMagnitude {
  std::string label;
  double magnitude = 0.0;
};

// L2 norm of each relation's column in the gate matrix (bias excluded),
// sorted descending; equal magnitudes keep inventory order.
std::vector<RelationMagnitude> relation_magnitudes(const Model& model);

void write_relation_report(std::ostream& out, std::span<const RelationMagnitude> report);

// ||(w_a - w_b) - (w_c - w_d)|| / mean(||w_a - w_b||, ||w_c - w_d||), with w_x
// the gate column of relation x. Returns 0 when both differences vanish.
// Throws std::invalid_argument for labels outside the inventory.
double analogy_residual(const Model& model, const std::string& a, const std::string& b,
                        const std::string& c, const std::string& d);

struct RetrievalHit {
  std::size_t index = 0;  // position in the corpus
  double score = 0.0;
};

// Top-k corpus sentences by predicted relatedness to the query; ties keep
// corpus order.
std::vector<RetrievalHit> retrieve_similar(Model& model, EmbeddingTable& embeddings,
                                           const DepTree& query, std::span<const DepTree> corpus,
                                           std::size_t k, std::size_t threads = 1);

// Mean of the token embeddings.
std::vector<double> mean_vector_sentence(std::span<const std::string> tokens,
                                         const EmbeddingTable& embeddings);

}  // namespace tdlstm
