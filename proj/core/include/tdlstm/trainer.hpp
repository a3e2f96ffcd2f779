#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tdlstm/datasets.hpp"
#include "tdlstm/embeddings.hpp"
#include "tdlstm/model.hpp"

namespace tdlstm {

struct TrainConfig {
  double learning_rate = 0.25;
  std::size_t batch_size = 25;
  double weight_decay = 1e-4;
  std::size_t patience = 10;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 1;
  bool fine_tune_embeddings = false;
  double adagrad_eps = 1e-8;
  std::size_t threads = 1;

  // Throws std::invalid_argument on non-positive fields.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_metric = 0.0;  // NaN when undefined
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 0 = initial parameters were never beaten
  double best_dev_metric = 0.0;

  // Header epoch,train_loss,dev_metric,seconds. With zero_seconds the wall
  // time column is written as 0 so reruns compare byte for byte.
  void write_csv(std::ostream& out, bool zero_seconds = false) const;
};

struct TrainResult {
  Model model;  // best-dev snapshot
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Adagrad over shuffled mini-batches. The batch loss is the mean per-example
// loss plus the L2 penalty; after every epoch the dev metric (Pearson r) is
// computed and the best snapshot kept. Stops after `patience` epochs without
// strict improvement or at max_epochs. With fine_tune_embeddings the table is
// trained too and left holding the best snapshot's rows on return.
// Throws NumericError if a batch loss is not finite.
TrainResult train_relatedness(Model model, EmbeddingTable& embeddings,
                              std::span<const PairExample> train, std::span<const PairExample> dev,
                              const TrainConfig& config, const EpochCallback& on_epoch = {});

// As above with per-node NLL over labeled nodes (mean over the batch's
// labeled nodes) and root accuracy as the dev metric.
TrainResult train_sentiment(Model model, EmbeddingTable& embeddings,
                            std::span<const SentimentTree> train,
                            std::span<const SentimentTree> dev, const TrainConfig& config,
                            const EpochCallback& on_epoch = {});

// Gradient of one relatedness mini-batch (mean KL + L2) accumulated into the
// model's parameter grads; returns the batch loss. Exposed for tests.
double accumulate_relatedness_batch(Model& model, EmbeddingTable& embeddings,
                                    std::span<const PairExample* const> batch,
                                    const TrainConfig& config);
double accumulate_sentiment_batch(Model& model, EmbeddingTable& embeddings,
                                  std::span<const SentimentTree* const> batch,
                                  const TrainConfig& config);

}  // namespace tdlstm
