#include "tdlstm/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

#include "parallel.hpp"
#include "tdlstm/error.hpp"
#include "tdlstm/inference.hpp"
#include "tdlstm/optimizer.hpp"
#include "tdlstm/tree_encoder.hpp"

namespace tdlstm {

namespace {

EncoderOptions encoder_options(const Model& model, const TrainConfig& config) {
  EncoderOptions opts;
  opts.typed = model.config.typed;
  opts.train_embeddings = config.fine_tune_embeddings;
  return opts;
}

std::vector<Parameter*> trainable(Model& model, EmbeddingTable& embeddings,
                                  const TrainConfig& config) {
  auto params = model.parameters();
  if (config.fine_tune_embeddings) params.push_back(&embeddings.parameter());
  return params;
}

// Runs one graph per example (possibly in parallel), then merges parameter
// gradients in example order and adds the L2 term. Returns the batch loss.
template <typename BuildLoss>
double accumulate_batch(Model& model, std::size_t count, const TrainConfig& config,
                        BuildLoss&& build_loss) {
  std::vector<Graph> graphs(count);
  std::vector<double> losses(count, 0.0);
  detail::parallel_for(count, config.threads, [&](std::size_t i) {
    Var loss = build_loss(graphs[i], i);
    losses[i] = graphs[i].scalar(loss);
    graphs[i].backward(loss, /*flush=*/false);
  });
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    graphs[i].flush_parameter_grads();
    total += losses[i];
  }
  Graph reg;
  auto params = model.parameters();
  Var penalty = l2_penalty(reg, params, config.weight_decay);
  total += reg.scalar(penalty);
  reg.backward(penalty);
  return total;
}

double relatedness_metric(Model& model, EmbeddingTable& embeddings,
                          std::span<const PairExample> dev, std::size_t threads) {
  auto m = evaluate_relatedness(model, embeddings, dev, threads);
  return m.pearson.value_or(std::numeric_limits<double>::quiet_NaN());
}

double sentiment_metric(Model& model, EmbeddingTable& embeddings,
                        std::span<const SentimentTree> dev, std::size_t threads) {
  return evaluate_sentiment(model, embeddings, dev, threads).accuracy;
}

template <typename Example, typename BatchFn, typename MetricFn>
TrainResult run_training(Model model, EmbeddingTable& embeddings, std::span<const Example> train,
                         std::span<const Example> dev, const TrainConfig& config,
                         const EpochCallback& on_epoch, BatchFn&& batch_fn,
                         MetricFn&& metric_fn) {
  config.validate();
  if (train.empty() || dev.empty()) throw std::invalid_argument("train: empty split");

  for (Parameter* p : trainable(model, embeddings, config)) {
    p->zero_grad();
    p->adagrad_accum.fill(0.0);
  }

  TrainResult result{model, {}};
  result.history.best_dev_metric = -std::numeric_limits<double>::infinity();
  Tensor best_embeddings = embeddings.parameter().value;

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::vector<const Example*> batch;
      batch.reserve(end - begin);
      for (std::size_t k = begin; k < end; ++k) batch.push_back(&train[order[k]]);

      const double batch_loss = batch_fn(model, embeddings, batch, config);
      if (!std::isfinite(batch_loss)) {
        throw NumericError("training diverged: non-finite loss in epoch " + std::to_string(epoch));
      }
      loss_sum += batch_loss * static_cast<double>(batch.size());
      auto params = trainable(model, embeddings, config);
      adagrad_step(params, config.learning_rate, config.adagrad_eps);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train.size());
    rec.dev_metric = metric_fn(model, embeddings, dev, config.threads);
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.epochs.push_back(rec);

    if (rec.dev_metric > result.history.best_dev_metric) {
      result.history.best_dev_metric = rec.dev_metric;
      result.history.best_epoch = epoch;
      result.model = model;
      if (config.fine_tune_embeddings) best_embeddings = embeddings.parameter().value;
      stale = 0;
    } else {
      ++stale;
    }
    if (on_epoch) on_epoch(rec);
    if (stale >= config.patience) break;
  }

  if (config.fine_tune_embeddings) embeddings.parameter().value = best_embeddings;
  for (Parameter* p : trainable(result.model, embeddings, config)) p->zero_grad();
  return result;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (weight_decay < 0.0) throw std::invalid_argument("weight decay must be nonnegative");
  if (patience == 0) throw std::invalid_argument("patience must be at least 1");
  if (max_epochs == 0) throw std::invalid_argument("max_epochs must be positive");
  if (threads == 0) throw std::invalid_argument("threads must be positive");
}

void TrainHistory::write_csv(std::ostream& out, bool zero_seconds) const {
  const auto old_precision = out.precision(17);
  out << "epoch,train_loss,dev_metric,seconds\n";
  for (const auto& r : epochs) {
    out << r.epoch << ',' << r.train_loss << ',' << r.dev_metric << ','
        << (zero_seconds ? 0.0 : r.seconds) << '\n';
  }
  out.precision(old_precision);
}

double accumulate_relatedness_batch(Model& model, EmbeddingTable& embeddings,
                                    std::span<const PairExample* const> batch,
                                    const TrainConfig& config) {
  const auto opts = encoder_options(model, config);
  const double weight = 1.0 / static_cast<double>(batch.size());
  return accumulate_batch(model, batch.size(), config, [&](Graph& g, std::size_t i) {
    const PairExample& ex = *batch[i];
    auto l = encode_tree(g, model.cell, model.gate, ex.left, embeddings, model.inventory, opts);
    auto r = encode_tree(g, model.cell, model.gate, ex.right, embeddings, model.inventory, opts);
    Var kl = relatedness_divergence(g, model.relatedness, {l.sentence, r.sentence, ex.score});
    return g.scale(kl, weight);
  });
}

double accumulate_sentiment_batch(Model& model, EmbeddingTable& embeddings,
                                  std::span<const SentimentTree* const> batch,
                                  const TrainConfig& config) {
  const auto opts = encoder_options(model, config);
  std::size_t labeled = 0;
  for (const auto* st : batch) labeled += st->node_labels.size();
  if (labeled == 0) return accumulate_batch(model, 0, config, [](Graph& g, std::size_t) {
    return g.scalar_input(0.0);
  });
  const double weight = 1.0 / static_cast<double>(labeled);
  return accumulate_batch(model, batch.size(), config, [&](Graph& g, std::size_t i) {
    const SentimentTree& st = *batch[i];
    if (st.node_labels.empty()) return g.scalar_input(0.0);
    auto enc = encode_tree(g, model.cell, model.gate, st.tree, embeddings, model.inventory, opts);
    std::vector<Var> terms;
    terms.reserve(st.node_labels.size());
    for (const auto& [node, label] : st.node_labels) {
      Var probs = sentiment_forward(g, model.sentiment, enc.states[node - 1].h);
      terms.push_back(g.neg_log_pick(probs, static_cast<std::size_t>(label)));
    }
    return g.scale(g.sum(terms), weight);
  });
}

TrainResult train_relatedness(Model model, EmbeddingTable& embeddings,
                              std::span<const PairExample> train, std::span<const PairExample> dev,
                              const TrainConfig& config, const EpochCallback& on_epoch) {
  if (model.config.task != Task::relatedness) {
    throw std::invalid_argument("train_relatedness: model is configured for another task");
  }
  return run_training<PairExample>(std::move(model), embeddings, train, dev, config, on_epoch,
                                   accumulate_relatedness_batch, relatedness_metric);
}

TrainResult train_sentiment(Model model, EmbeddingTable& embeddings,
                            std::span<const SentimentTree> train,
                            std::span<const SentimentTree> dev, const TrainConfig& config,
                            const EpochCallback& on_epoch) {
  if (model.config.task != Task::sentiment) {
    throw std::invalid_argument("train_sentiment: model is configured for another task");
  }
  return run_training<SentimentTree>(std::move(model), embeddings, train, dev, config, on_epoch,
                                     accumulate_sentiment_batch, sentiment_metric);
}

}  // namespace tdlstm
