#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tdlstm/cells.hpp"
#include "tdlstm/embeddings.hpp"
#include "tdlstm/heads.hpp"
#include "tdlstm/relation_inventory.hpp"

namespace tdlstm {

enum class Task { relatedness, sentiment };

std::string to_string(Task t);
Task parse_task(const std::string& name);

struct ModelConfig {
  Task task = Task::relatedness;
  bool typed = true;
  std::size_t memory_dim = 150;
  std::size_t embedding_dim = 300;
  std::size_t hidden_dim = 50;  // relatedness comparison layer
  std::size_t classes = 5;      // 5 score classes or 2 sentiment classes
  GateActivation gate = GateActivation::sigmoid;
  // Count the relation-gate matrix in the L2 penalty.
  bool regularize_relation_gate = true;
};

// All trainable state: cell, relation gate and both task heads (only the
// head of config.task is trained or saved).
struct Model {
  ModelConfig config;
  RelationInventory inventory = RelationInventory::universal();
  CellParams cell;
  RelationGateParams gate;
  RelatednessHead relatedness;
  SentimentHead sentiment;

  static Model create(const ModelConfig& config, std::uint64_t seed,
                      const RelationInventory& inventory = RelationInventory::universal());

  // Parameters updated by training for config.task. The gate is omitted for
  // the untyped baseline.
  std::vector<Parameter*> parameters();
};

// Versioned JSON container. Tuned embedding rows are stored when given.
void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const EmbeddingTable* tuned_embeddings = nullptr);

struct LoadedCheckpoint {
  Model model;
  // word -> row for embeddings that were fine-tuned during training.
  std::optional<EmbeddingTable> embeddings;
};

// Throws DataError naming the offending field on malformed content or when
// the stored relation inventory differs from `expected_inventory`.
LoadedCheckpoint load_checkpoint(
    const std::filesystem::path& path,
    const RelationInventory& expected_inventory = RelationInventory::universal());

// Overwrites rows of `table` for words present in `tuned`.
void apply_tuned_embeddings(EmbeddingTable& table, const EmbeddingTable& tuned);

}  // namespace tdlstm
