#include "tdlstm/heads.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tdlstm/error.hpp"

namespace tdlstm {

namespace {

Parameter weight(const std::string& name, std::size_t rows, std::size_t cols, double bound,
                 std::mt19937_64& rng) {
  Tensor t = Tensor::matrix(rows, cols);
  fill_uniform(t, bound, rng);
  Parameter p(name, std::move(t));
  p.regularized = true;
  return p;
}

}  // namespace

RelatednessHead RelatednessHead::create(std::size_t memory_dim, std::size_t hidden_dim,
                                        std::size_t classes, std::mt19937_64& rng) {
  if (classes < 2) throw std::invalid_argument("relatedness head needs at least 2 classes");
  const double bound = 1.0 / std::sqrt(static_cast<double>(memory_dim));
  RelatednessHead head{
      weight("relatedness.u", hidden_dim, memory_dim, bound, rng),
      weight("relatedness.v", hidden_dim, memory_dim, bound, rng),
      Parameter("relatedness.b_h", Tensor::vector(hidden_dim)),
      weight("relatedness.w", classes, hidden_dim, bound, rng),
      Parameter("relatedness.b_p", Tensor::vector(classes)),
      Tensor::vector(classes),
  };
  for (std::size_t k = 0; k < classes; ++k) head.score_range[k] = static_cast<double>(k + 1);
  return head;
}

RelatednessOutput relatedness_forward(Graph& g, RelatednessHead& head, Var h_left, Var h_right) {
  Var mult = g.hadamard(h_left, h_right);
  Var dist = g.abs_diff(h_left, h_right);
  Var hidden = g.sigmoid(g.sum(std::vector<Var>{g.matvec(g.param(head.u), mult),
                                                g.matvec(g.param(head.v), dist),
                                                g.param(head.b_h)}));
  Var probs = g.softmax(g.add(g.matvec(g.param(head.w), hidden), g.param(head.b_p)));
  return {probs, g.dot_const(head.score_range, probs)};
}

Tensor target_distribution(double y, std::size_t classes) {
  const double top = static_cast<double>(classes);
  if (!(y >= 1.0 && y <= top)) {
    throw std::out_of_range("target score " + std::to_string(y) + " outside [1, " +
                            std::to_string(classes) + "]");
  }
  Tensor p = Tensor::vector(classes);
  const double lo = std::floor(y);
  const double frac = y - lo;
  const auto lo_idx = static_cast<std::size_t>(lo) - 1;
  if (frac == 0.0) {
    p[lo_idx] = 1.0;
  } else {
    p[lo_idx] = 1.0 - frac;
    p[lo_idx + 1] = frac;
  }
  return p;
}

Var l2_penalty(Graph& g, std::span<Parameter* const> params, double lambda) {
  std::vector<Var> terms;
  for (Parameter* p : params) {
    if (p->regularized) terms.push_back(g.sum_squares(g.param(*p)));
  }
  if (terms.empty()) return g.scalar_input(0.0);
  return g.scale(g.sum(terms), 0.5 * lambda);
}

Var relatedness_divergence(Graph& g, RelatednessHead& head, const ScoredPair& pair) {
  RelatednessOutput out = relatedness_forward(g, head, pair.h_left, pair.h_right);
  return g.kl_divergence(target_distribution(pair.gold, head.classes()), out.distribution);
}

Var relatedness_loss(Graph& g, RelatednessHead& head, std::span<const ScoredPair> batch,
                     double lambda, std::span<Parameter* const> params) {
  if (batch.empty()) throw std::invalid_argument("relatedness_loss: empty batch");
  std::vector<Var> terms;
  terms.reserve(batch.size());
  for (const auto& pair : batch) terms.push_back(relatedness_divergence(g, head, pair));
  Var mean = g.scale(g.sum(terms), 1.0 / static_cast<double>(batch.size()));
  return g.add(mean, l2_penalty(g, params, lambda));
}

SentimentHead SentimentHead::create(std::size_t memory_dim, std::size_t classes,
                                    std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(memory_dim));
  return SentimentHead{weight("sentiment.w", classes, memory_dim, bound, rng),
                       Parameter("sentiment.b", Tensor::vector(classes))};
}

Var sentiment_forward(Graph& g, SentimentHead& head, Var h) {
  return g.softmax(g.add(g.matvec(g.param(head.w), h), g.param(head.b)));
}

std::size_t predict_label(std::span<const double> distribution) {
  if (distribution.empty()) throw std::invalid_argument("predict_label: empty distribution");
  std::size_t best = 0;
  for (std::size_t i = 1; i < distribution.size(); ++i) {
    if (distribution[i] > distribution[best]) best = i;
  }
  return best;
}

Var sentiment_loss(Graph& g, SentimentHead& head, std::span<const LabeledHidden> nodes,
                   double lambda, std::span<Parameter* const> params) {
  if (nodes.empty()) throw std::invalid_argument("sentiment_loss: no labeled nodes");
  std::vector<Var> terms;
  terms.reserve(nodes.size());
  for (const auto& n : nodes) {
    terms.push_back(g.neg_log_pick(sentiment_forward(g, head, n.h), n.label));
  }
  Var mean = g.scale(g.sum(terms), 1.0 / static_cast<double>(nodes.size()));
  return g.add(mean, l2_penalty(g, params, lambda));
}

}  // namespace tdlstm
