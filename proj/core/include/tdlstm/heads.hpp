#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "tdlstm/graph.hpp"
#include "tdlstm/tensor.hpp"

namespace tdlstm {

// Siamese comparison layer and score classifier:
//   h_s = sigmoid(U (h_l * h_r) + V |h_l - h_r| + b_h)
//   p   = softmax(W h_s + b_p),  y_hat = [1..K] . p
struct RelatednessHead {
  Parameter u, v, b_h;  // hidden x memory, hidden x memory, hidden
  Parameter w, b_p;     // classes x hidden, classes
  Tensor score_range;   // [1, 2, ..., K]

  static RelatednessHead create(std::size_t memory_dim, std::size_t hidden_dim, std::size_t classes,
                                std::mt19937_64& rng);
  std::size_t classes() const { return b_p.value.size(); }
  std::vector<Parameter*> parameters() { return {&u, &v, &b_h, &w, &b_p}; }
  std::vector<const Parameter*> parameters() const { return {&u, &v, &b_h, &w, &b_p}; }
};

struct RelatednessOutput {
  Var distribution;
  Var score;
};

RelatednessOutput relatedness_forward(Graph& g, RelatednessHead& head, Var h_left, Var h_right);

// Sparse distribution over 1..K whose expectation is exactly y.
Tensor target_distribution(double y, std::size_t classes);

// (lambda / 2) * sum of squared entries of the parameters flagged regularized.
Var l2_penalty(Graph& g, std::span<Parameter* const> params, double lambda);

struct ScoredPair {
  Var h_left;
  Var h_right;
  double gold = 0.0;
};

// KL(target(gold) || p) for one pair.
Var relatedness_divergence(Graph& g, RelatednessHead& head, const ScoredPair& pair);

// Mean KL over the batch plus l2_penalty(params, lambda).
Var relatedness_loss(Graph& g, RelatednessHead& head, std::span<const ScoredPair> batch,
                     double lambda, std::span<Parameter* const> params);

// p = softmax(W h + b) over the two sentiment classes.
struct SentimentHead {
  Parameter w, b;

  static SentimentHead create(std::size_t memory_dim, std::size_t classes, std::mt19937_64& rng);
  std::size_t classes() const { return b.value.size(); }
  std::vector<Parameter*> parameters() { return {&w, &b}; }
  std::vector<const Parameter*> parameters() const { return {&w, &b}; }
};

Var sentiment_forward(Graph& g, SentimentHead& head, Var h);

// Argmax; ties go to the lowest index.
std::size_t predict_label(std::span<const double> distribution);

struct LabeledHidden {
  Var h;
  std::size_t label = 0;
};

// -(1/m) sum log p(label) over m labeled nodes, plus l2_penalty(params, lambda).
Var sentiment_loss(Graph& g, SentimentHead& head, std::span<const LabeledHidden> nodes,
                   double lambda, std::span<Parameter* const> params);

}  // namespace tdlstm
