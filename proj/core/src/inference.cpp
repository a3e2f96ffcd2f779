#include "tdlstm/inference.hpp"

#include <stdexcept>

#include "parallel.hpp"
#include "tdlstm/tree_encoder.hpp"

namespace tdlstm {

namespace {

EncoderOptions options_for(const Model& model) {
  EncoderOptions opts;
  opts.typed = model.config.typed;
  return opts;
}

}  // namespace

std::vector<double> sentence_vector(Model& model, EmbeddingTable& embeddings, const DepTree& tree) {
  Graph g;
  auto enc = encode_tree(g, model.cell, model.gate, tree, embeddings, model.inventory,
                         options_for(model));
  return g.value(enc.sentence).values();
}

double predict_score(Model& model, EmbeddingTable& embeddings, const DepTree& left,
                     const DepTree& right) {
  Graph g;
  const auto opts = options_for(model);
  auto l = encode_tree(g, model.cell, model.gate, left, embeddings, model.inventory, opts);
  auto r = encode_tree(g, model.cell, model.gate, right, embeddings, model.inventory, opts);
  return g.scalar(relatedness_forward(g, model.relatedness, l.sentence, r.sentence).score);
}

std::vector<double> predict_scores(Model& model, EmbeddingTable& embeddings,
                                   std::span<const PairExample> pairs, std::size_t threads) {
  std::vector<double> out(pairs.size());
  detail::parallel_for(pairs.size(), threads, [&](std::size_t i) {
    out[i] = predict_score(model, embeddings, pairs[i].left, pairs[i].right);
  });
  return out;
}

std::vector<double> sentiment_distribution(Model& model, EmbeddingTable& embeddings,
                                           const DepTree& tree) {
  Graph g;
  auto enc = encode_tree(g, model.cell, model.gate, tree, embeddings, model.inventory,
                         options_for(model));
  return g.value(sentiment_forward(g, model.sentiment, enc.sentence)).values();
}

RelatednessMetrics evaluate_relatedness(Model& model, EmbeddingTable& embeddings,
                                        std::span<const PairExample> pairs, std::size_t threads) {
  if (pairs.empty()) throw std::invalid_argument("evaluate_relatedness: no pairs");
  const auto predicted = predict_scores(model, embeddings, pairs, threads);
  std::vector<double> gold;
  gold.reserve(pairs.size());
  for (const auto& p : pairs) gold.push_back(p.score);
  return relatedness_metrics(predicted, gold);
}

BinaryMetrics evaluate_sentiment(Model& model, EmbeddingTable& embeddings,
                                 std::span<const SentimentTree> trees, std::size_t threads) {
  std::vector<const SentimentTree*> labeled;
  for (const auto& t : trees) {
    if (t.node_labels.contains(t.tree.root())) labeled.push_back(&t);
  }
  if (labeled.empty()) throw std::invalid_argument("evaluate_sentiment: no root-labeled trees");
  std::vector<std::size_t> predicted(labeled.size());
  std::vector<std::size_t> gold(labeled.size());
  detail::parallel_for(labeled.size(), threads, [&](std::size_t i) {
    const auto& st = *labeled[i];
    predicted[i] = predict_label(sentiment_distribution(model, embeddings, st.tree));
    gold[i] = static_cast<std::size_t>(st.node_labels.at(st.tree.root()));
  });
  return binary_metrics(predicted, gold);
}

}  // namespace tdlstm
