#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tdlstm/cells.hpp"
#include "tdlstm/model.hpp"
#include "tdlstm/trainer.hpp"

namespace tdlstm::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumericError = 3 };

// Everything a command may need. Values come from task defaults, then the
// config file, then command-line flags.
struct RunConfig {
  Task task = Task::relatedness;
  bool typed = true;
  GateActivation gate = GateActivation::sigmoid;
  std::uint64_t seed = 1;
  std::size_t dim = 150;
  std::size_t embedding_dim = 0;  // 0 = read from the embedding file
  std::size_t hidden_dim = 50;
  double lr = 0.25;
  std::size_t batch = 25;
  double weight_decay = 1e-4;
  std::size_t patience = 10;
  std::size_t max_epochs = 100;
  bool fine_tune_embeddings = false;
  bool regularize_relation_gate = true;
  std::size_t threads = 1;
  bool deterministic = false;

  std::filesystem::path embeddings, treebank, dataset, phrases;
  std::filesystem::path train, dev, test, checkpoint, input, query, corpus, out;
  std::string split = "data";
  std::size_t k = 3;

  ModelConfig model_config(std::size_t embedding_dim) const;
  TrainConfig train_config() const;
};

using Settings = std::map<std::string, std::string>;

// Flat "key = value" lines; '#' starts a comment. Keys use underscores
// (dashes are accepted and folded). Throws std::invalid_argument on syntax
// errors or unknown keys.
Settings read_config_file(const std::filesystem::path& path);
Settings parse_config(std::istream& in);

// Applies task defaults (sentiment: lr 0.05, dim 170), then `settings`.
RunConfig resolve_config(const Settings& settings);

// Writes the effective configuration in the read_config_file format.
void write_config(std::ostream& out, const RunConfig& cfg);

// Number of values on the first line of an embedding file.
std::size_t detect_embedding_dim(const std::filesystem::path& path);

// Entry point. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tdlstm::cli
