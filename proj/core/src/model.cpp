#include "tdlstm/model.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "json.hpp"

#include "tdlstm/error.hpp"

namespace tdlstm {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "tdlstm-checkpoint";
constexpr int kVersion = 1;

// Cell, gate and the head of the configured task.
template <typename M>
auto saved_parameters(M& m) {
  auto out = m.cell.parameters();
  out.push_back(&m.gate.w);
  out.push_back(&m.gate.b);
  auto head = m.config.task == Task::relatedness ? m.relatedness.parameters()
                                                 : m.sentiment.parameters();
  out.insert(out.end(), head.begin(), head.end());
  return out;
}

json tensor_json(const Tensor& t) {
  return json{{"shape", t.shape()}, {"values", t.values()}};
}

template <typename T>
T field(const json& obj, const std::string& name) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw DataError("checkpoint: missing field '" + name + "'");
  }
  try {
    return obj.at(name).get<T>();
  } catch (const json::exception&) {
    throw DataError("checkpoint: field '" + name + "' has the wrong type");
  }
}

Tensor tensor_from(const json& obj, const std::string& name) {
  if (!obj.is_object() || !obj.contains("shape") || !obj.contains("values")) {
    throw DataError("checkpoint: field '" + name + "' is not a tensor");
  }
  try {
    auto shape = obj.at("shape").get<std::vector<std::size_t>>();
    auto values = obj.at("values").get<std::vector<double>>();
    return Tensor(std::move(shape), std::move(values));
  } catch (const json::exception&) {
    throw DataError("checkpoint: field '" + name + "' is not a tensor");
  } catch (const DimensionError& e) {
    throw DataError("checkpoint: field '" + name + "': " + e.what());
  }
}

}  // namespace

std::string to_string(Task t) { return t == Task::relatedness ? "relatedness" : "sentiment"; }

Task parse_task(const std::string& name) {
  if (name == "relatedness") return Task::relatedness;
  if (name == "sentiment") return Task::sentiment;
  throw std::invalid_argument("unknown task '" + name + "'");
}

Model Model::create(const ModelConfig& config, std::uint64_t seed,
                    const RelationInventory& inventory) {
  std::mt19937_64 rng(seed);
  Model m;
  m.config = config;
  m.inventory = inventory;
  m.cell = CellParams::create(config.memory_dim, config.embedding_dim, rng);
  m.gate = RelationGateParams::create(config.memory_dim, inventory.size(), config.gate, rng);
  m.gate.w.regularized = config.regularize_relation_gate;
  m.relatedness = RelatednessHead::create(
      config.memory_dim, config.hidden_dim,
      config.task == Task::relatedness ? config.classes : 5, rng);
  m.sentiment = SentimentHead::create(config.memory_dim,
                                      config.task == Task::sentiment ? config.classes : 2, rng);
  return m;
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> out = cell.parameters();
  if (config.typed) {
    out.push_back(&gate.w);
    out.push_back(&gate.b);
  }
  auto head = config.task == Task::relatedness ? relatedness.parameters() : sentiment.parameters();
  out.insert(out.end(), head.begin(), head.end());
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const Model& model,
                     const EmbeddingTable* tuned_embeddings) {
  json params = json::object();
  for (const Parameter* p : saved_parameters(model)) params[p->name] = tensor_json(p->value);

  json doc{
      {"format", kFormat},
      {"version", kVersion},
      {"task", to_string(model.config.task)},
      {"typed", model.config.typed},
      {"memory_dim", model.config.memory_dim},
      {"embedding_dim", model.config.embedding_dim},
      {"hidden_dim", model.config.hidden_dim},
      {"classes", model.config.classes},
      {"gate_activation", to_string(model.config.gate)},
      {"regularize_relation_gate", model.config.regularize_relation_gate},
      {"relations", model.inventory.labels()},
      {"parameters", std::move(params)},
  };
  if (tuned_embeddings) {
    doc["embeddings"] = json{{"words", tuned_embeddings->words()},
                             {"matrix", tensor_json(tuned_embeddings->parameter().value)}};
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << doc.dump() << '\n';
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path,
                                 const RelationInventory& expected_inventory) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("checkpoint: not valid JSON: ") + e.what());
  }
  if (field<std::string>(doc, "format") != kFormat) {
    throw DataError("checkpoint: field 'format' is not " + std::string(kFormat));
  }
  if (field<int>(doc, "version") != kVersion) {
    throw DataError("checkpoint: unsupported 'version'");
  }

  ModelConfig cfg;
  try {
    cfg.task = parse_task(field<std::string>(doc, "task"));
    cfg.gate = parse_gate_activation(field<std::string>(doc, "gate_activation"));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  cfg.typed = field<bool>(doc, "typed");
  cfg.memory_dim = field<std::size_t>(doc, "memory_dim");
  cfg.embedding_dim = field<std::size_t>(doc, "embedding_dim");
  cfg.hidden_dim = field<std::size_t>(doc, "hidden_dim");
  cfg.classes = field<std::size_t>(doc, "classes");
  cfg.regularize_relation_gate = field<bool>(doc, "regularize_relation_gate");
  if (cfg.memory_dim == 0 || cfg.embedding_dim == 0 || cfg.hidden_dim == 0 || cfg.classes < 2) {
    throw DataError("checkpoint: field 'memory_dim'/'embedding_dim'/'hidden_dim'/'classes' invalid");
  }

  const auto relations = field<std::vector<std::string>>(doc, "relations");
  if (relations != expected_inventory.labels()) {
    throw DataError("checkpoint: field 'relations' does not match the relation inventory (" +
                    std::to_string(relations.size()) + " stored vs " +
                    std::to_string(expected_inventory.size()) + " expected)");
  }

  LoadedCheckpoint loaded{Model::create(cfg, 0, expected_inventory), std::nullopt};
  if (!doc.contains("parameters") || !doc["parameters"].is_object()) {
    throw DataError("checkpoint: missing field 'parameters'");
  }
  const json& params = doc["parameters"];
  for (Parameter* p : saved_parameters(loaded.model)) {
    const std::string fname = "parameters." + p->name;
    if (!params.contains(p->name)) throw DataError("checkpoint: missing field '" + fname + "'");
    Tensor t = tensor_from(params[p->name], fname);
    if (t.shape() != p->value.shape()) {
      throw DataError("checkpoint: field '" + fname + "' has shape " + shape_string(t.shape()) +
                      ", expected " + shape_string(p->value.shape()));
    }
    if (!t.all_finite()) throw DataError("checkpoint: field '" + fname + "' is not finite");
    p->value = std::move(t);
    p->zero_grad();
    p->adagrad_accum.fill(0.0);
  }

  if (doc.contains("embeddings")) {
    const json& emb = doc["embeddings"];
    auto words = field<std::vector<std::string>>(emb, "words");
    if (!emb.contains("matrix")) throw DataError("checkpoint: missing field 'embeddings.matrix'");
    Tensor matrix = tensor_from(emb["matrix"], "embeddings.matrix");
    if (matrix.rank() != 2 || matrix.rows() != words.size() ||
        matrix.cols() != cfg.embedding_dim) {
      throw DataError("checkpoint: field 'embeddings.matrix' has shape " +
                      shape_string(matrix.shape()));
    }
    loaded.embeddings.emplace(std::move(words), std::move(matrix));
  }
  return loaded;
}

void apply_tuned_embeddings(EmbeddingTable& table, const EmbeddingTable& tuned) {
  if (table.dim() != tuned.dim()) {
    throw DimensionError("tuned embeddings have dimension " + std::to_string(tuned.dim()) +
                         ", table has " + std::to_string(table.dim()));
  }
  const std::size_t e = table.dim();
  auto& dst = table.parameter().value.values();
  const auto& src = tuned.parameter().value.values();
  for (std::size_t r = 0; r < tuned.vocab_size(); ++r) {
    if (auto row = table.find(tuned.words()[r])) {
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(r * e), e,
                  dst.begin() + static_cast<std::ptrdiff_t>(*row * e));
    }
  }
}

}  // namespace tdlstm
