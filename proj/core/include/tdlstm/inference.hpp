#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tdlstm/datasets.hpp"
#include "tdlstm/embeddings.hpp"
#include "tdlstm/metrics.hpp"
#include "tdlstm/model.hpp"

namespace tdlstm {

// Root hidden state of a sentence under the model's encoder.
std::vector<double> sentence_vector(Model& model, EmbeddingTable& embeddings, const DepTree& tree);

// Expected relatedness score in [1, K].
double predict_score(Model& model, EmbeddingTable& embeddings, const DepTree& left,
                     const DepTree& right);
std::vector<double> predict_scores(Model& model, EmbeddingTable& embeddings,
                                   std::span<const PairExample> pairs, std::size_t threads = 1);

// Class distribution at the root word.
std::vector<double> sentiment_distribution(Model& model, EmbeddingTable& embeddings,
                                           const DepTree& tree);

RelatednessMetrics evaluate_relatedness(Model& model, EmbeddingTable& embeddings,
                                        std::span<const PairExample> pairs,
                                        std::size_t threads = 1);

// Root-node metrics; trees without a root label are skipped.
BinaryMetrics evaluate_sentiment(Model& model, EmbeddingTable& embeddings,
                                 std::span<const SentimentTree> trees, std::size_t threads = 1);

}  // namespace tdlstm
