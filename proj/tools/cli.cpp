#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "tdlstm/analysis.hpp"
#include "tdlstm/conll.hpp"
#include "tdlstm/datasets.hpp"
#include "tdlstm/embeddings.hpp"
#include "tdlstm/error.hpp"
#include "tdlstm/heads.hpp"
#include "tdlstm/inference.hpp"
#include "tdlstm/synthetic.hpp"

namespace tdlstm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string fold_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  std::string lower = v;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  throw UsageError(key + ": expected true or false, got '" + v + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw UsageError(key + ": bad number '" + v + "'");
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string&)>;

Setter size_field(std::size_t RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    c.*field = parse_number<std::size_t>(k, v);
  };
}
Setter real_field(double RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    c.*field = parse_number<double>(k, v);
  };
}
Setter bool_field(bool RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    c.*field = parse_bool(k, v);
  };
}
Setter path_field(fs::path RunConfig::*field) {
  return [field](RunConfig& c, const std::string&, const std::string& v) { c.*field = v; };
}

// Every key accepted in config files and as --flag.
const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"task",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         try {
           c.task = parse_task(v);
         } catch (const std::invalid_argument&) {
           throw UsageError(k + ": expected relatedness or sentiment, got '" + v + "'");
         }
       }},
      {"typed", bool_field(&RunConfig::typed)},
      {"gate",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         try {
           c.gate = parse_gate_activation(v);
         } catch (const std::invalid_argument&) {
           throw UsageError(k + ": expected sigmoid, tanh or relu, got '" + v + "'");
         }
       }},
      {"seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seed = parse_number<std::uint64_t>(k, v);
       }},
      {"dim", size_field(&RunConfig::dim)},
      {"embedding_dim", size_field(&RunConfig::embedding_dim)},
      {"hidden_dim", size_field(&RunConfig::hidden_dim)},
      {"lr", real_field(&RunConfig::lr)},
      {"batch", size_field(&RunConfig::batch)},
      {"weight_decay", real_field(&RunConfig::weight_decay)},
      {"patience", size_field(&RunConfig::patience)},
      {"max_epochs", size_field(&RunConfig::max_epochs)},
      {"fine_tune_embeddings", bool_field(&RunConfig::fine_tune_embeddings)},
      {"regularize_relation_gate", bool_field(&RunConfig::regularize_relation_gate)},
      {"threads", size_field(&RunConfig::threads)},
      {"deterministic", bool_field(&RunConfig::deterministic)},
      {"embeddings", path_field(&RunConfig::embeddings)},
      {"treebank", path_field(&RunConfig::treebank)},
      {"dataset", path_field(&RunConfig::dataset)},
      {"phrases", path_field(&RunConfig::phrases)},
      {"train", path_field(&RunConfig::train)},
      {"dev", path_field(&RunConfig::dev)},
      {"test", path_field(&RunConfig::test)},
      {"checkpoint", path_field(&RunConfig::checkpoint)},
      {"input", path_field(&RunConfig::input)},
      {"query", path_field(&RunConfig::query)},
      {"corpus", path_field(&RunConfig::corpus)},
      {"out", path_field(&RunConfig::out)},
      {"split", [](RunConfig& c, const std::string&, const std::string& v) { c.split = v; }},
      {"k", size_field(&RunConfig::k)},
  };
  return table;
}

const fs::path& require(const fs::path& p, const char* flag) {
  if (p.empty()) throw UsageError(std::string("missing required option --") + flag);
  return p;
}

std::string sentence_text(const DepTree& t) {
  std::string s;
  for (const auto& tok : t.tokens()) {
    if (!s.empty()) s += ' ';
    s += tok.form;
  }
  return s;
}

std::size_t embedding_dim_for(const RunConfig& cfg) {
  return cfg.embedding_dim != 0 ? cfg.embedding_dim : detect_embedding_dim(cfg.embeddings);
}

EmbeddingTable load_table(const RunConfig& cfg, const std::set<std::string>& vocab,
                          std::size_t dim, const std::optional<EmbeddingTable>& tuned,
                          std::ostream& err) {
  EmbeddingTable table = load_embeddings(require(cfg.embeddings, "embeddings"), vocab, dim);
  if (tuned) apply_tuned_embeddings(table, *tuned);
  if (table.oov_count > 0) {
    err << "embeddings: " << table.oov_count << " of " << table.vocab_size()
        << " words not found, using deterministic random vectors\n";
  }
  return table;
}

json relatedness_json(Model& model, EmbeddingTable& table, std::span<const PairExample> pairs,
                      std::size_t threads) {
  const auto m = evaluate_relatedness(model, table, pairs, threads);
  json j;
  j["pearson"] = m.pearson ? json(*m.pearson) : json(nullptr);
  j["mse"] = m.mse;
  j["examples"] = pairs.size();
  return j;
}

json sentiment_json(Model& model, EmbeddingTable& table, std::span<const SentimentTree> trees,
                    std::size_t threads) {
  const auto m = evaluate_sentiment(model, table, trees, threads);
  std::size_t rooted = 0;
  for (const auto& st : trees) rooted += st.node_labels.contains(st.tree.root()) ? 1 : 0;
  return json{{"accuracy", m.accuracy},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"examples", rooted}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

void warn_undefined_pearson(const json& metrics, std::ostream& err) {
  if (metrics.contains("pearson") && metrics["pearson"].is_null()) {
    err << "warning: Pearson correlation undefined (predictions or gold scores constant)\n";
  }
}

// ---------------------------------------------------------------- commands

struct Context {
  RunConfig cfg;
  Settings settings;
  std::ostream& out;
  std::ostream& err;
  double inject_gradient_error = 0.0;
};

int cmd_prepare(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const fs::path& dir = require(cfg.out, "out");
  json stats{{"task", to_string(cfg.task)}, {"split", cfg.split}};
  const fs::path target = dir / (cfg.split + ".conll");

  auto trees = parse_conll_file(require(cfg.treebank, "treebank"));
  if (cfg.task == Task::relatedness) {
    const auto records = load_pair_dataset(require(cfg.dataset, "dataset"));
    stats["trees"] = trees.size();
    const auto pairs = align_pairs(records, std::move(trees));
    fs::create_directories(dir);
    std::ostringstream buf;
    write_pair_examples(buf, pairs);
    write_text(target, buf.str());
    stats["examples"] = pairs.size();
  } else {
    const auto lexicon = load_phrase_labels(require(cfg.phrases, "phrases"));
    MatchStats match;
    std::vector<SentimentTree> labeled;
    labeled.reserve(trees.size());
    for (const auto& t : trees) labeled.push_back(label_nodes_by_phrase(t, lexicon, &match));
    fs::create_directories(dir);
    std::ostringstream buf;
    write_sentiment_trees(buf, labeled);
    write_text(target, buf.str());
    stats["trees"] = match.trees;
    stats["nodes"] = match.nodes;
    stats["labeled_nodes"] = match.labeled_nodes;
    stats["coverage"] = match.coverage();
    stats["noncontiguous_nodes"] = match.noncontiguous_nodes;
    stats["trees_with_root_label"] = match.trees_with_root_label;
    stats["phrases"] = lexicon.labels.size();
    stats["duplicate_phrases"] = lexicon.duplicates;
    stats["conflicting_duplicate_phrases"] = lexicon.conflicting_duplicates;
  }
  stats["output"] = target.string();
  write_text(dir / (cfg.split + ".stats.json"), stats.dump(2) + "\n");
  ctx.out << stats.dump(2) << '\n';
  return kOk;
}

int cmd_train(Context& ctx) {
  RunConfig& cfg = ctx.cfg;
  if (cfg.deterministic) cfg.threads = 1;
  const fs::path& dir = require(cfg.out, "out");
  require(cfg.train, "train");
  require(cfg.dev, "dev");
  require(cfg.embeddings, "embeddings");
  const std::size_t e = embedding_dim_for(cfg);
  const TrainConfig tc = cfg.train_config();
  try {
    tc.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  auto progress = [&](const EpochRecord& r) {
    ctx.err << "epoch " << r.epoch << " train_loss " << r.train_loss << " dev " << r.dev_metric
            << '\n';
  };

  Model model = Model::create(cfg.model_config(e), cfg.seed);
  TrainResult result;
  json train_metrics;
  std::optional<EmbeddingTable> table;
  if (cfg.task == Task::relatedness) {
    const auto train = read_pair_examples(cfg.train);
    const auto dev = read_pair_examples(cfg.dev);
    auto vocab = vocabulary(std::span(train));
    vocab.merge(vocabulary(std::span(dev)));
    table = load_table(cfg, vocab, e, std::nullopt, ctx.err);
    result = train_relatedness(std::move(model), *table, train, dev, tc, progress);
    train_metrics = relatedness_json(result.model, *table, train, cfg.threads);
  } else {
    const auto train = read_sentiment_trees(cfg.train);
    const auto dev = read_sentiment_trees(cfg.dev);
    auto vocab = vocabulary(std::span(train));
    vocab.merge(vocabulary(std::span(dev)));
    table = load_table(cfg, vocab, e, std::nullopt, ctx.err);
    result = train_sentiment(std::move(model), *table, train, dev, tc, progress);
    train_metrics = sentiment_json(result.model, *table, train, cfg.threads);
  }

  fs::create_directories(dir);
  save_checkpoint(dir / "model.json", result.model,
                  cfg.fine_tune_embeddings ? &*table : nullptr);
  std::ostringstream history;
  result.history.write_csv(history, cfg.deterministic);
  write_text(dir / "history.csv", history.str());
  if (cfg.deterministic) {
    std::ostringstream timing;
    timing << "epoch,seconds\n";
    for (const auto& r : result.history.epochs) timing << r.epoch << ',' << r.seconds << '\n';
    write_text(dir / "timing.csv", timing.str());
  }
  std::ostringstream effective;
  write_config(effective, cfg);
  write_text(dir / "config.txt", effective.str());
  train_metrics["split"] = "train";
  write_text(dir / "train_metrics.json", train_metrics.dump(2) + "\n");

  json summary{{"epochs", result.history.epochs.size()},
               {"best_epoch", result.history.best_epoch},
               {"best_dev_metric", result.history.best_dev_metric},
               {"train", train_metrics},
               {"checkpoint", (dir / "model.json").string()}};
  ctx.out << summary.dump(2) << '\n';
  return kOk;
}

LoadedCheckpoint load_for(Context& ctx) {
  auto loaded = load_checkpoint(require(ctx.cfg.checkpoint, "checkpoint"));
  const ModelConfig& mc = loaded.model.config;
  if (ctx.settings.contains("task") && ctx.cfg.task != mc.task) {
    throw DataError("checkpoint was trained for " + to_string(mc.task) + ", config asks for " +
                    to_string(ctx.cfg.task));
  }
  if (ctx.settings.contains("dim") && ctx.cfg.dim != mc.memory_dim) {
    throw DataError("checkpoint has memory_dim " + std::to_string(mc.memory_dim) +
                    ", config asks for " + std::to_string(ctx.cfg.dim));
  }
  if (ctx.settings.contains("typed") && ctx.cfg.typed != mc.typed) {
    throw DataError("checkpoint typed flag does not match the config");
  }
  if (ctx.settings.contains("embedding_dim") && ctx.cfg.embedding_dim != mc.embedding_dim) {
    throw DataError("checkpoint has embedding_dim " + std::to_string(mc.embedding_dim));
  }
  return loaded;
}

int cmd_eval(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  require(cfg.test, "test");
  auto loaded = load_for(ctx);
  Model& model = loaded.model;
  const std::size_t e = model.config.embedding_dim;
  json metrics;
  if (model.config.task == Task::relatedness) {
    const auto pairs = read_pair_examples(cfg.test);
    auto table = load_table(cfg, vocabulary(std::span(pairs)), e, loaded.embeddings, ctx.err);
    metrics = relatedness_json(model, table, pairs, cfg.threads);
  } else {
    const auto trees = read_sentiment_trees(cfg.test);
    auto table = load_table(cfg, vocabulary(std::span(trees)), e, loaded.embeddings, ctx.err);
    metrics = sentiment_json(model, table, trees, cfg.threads);
  }
  warn_undefined_pearson(metrics, ctx.err);
  if (!cfg.out.empty()) {
    fs::create_directories(cfg.out);
    write_text(cfg.out / "metrics.json", metrics.dump(2) + "\n");
  }
  ctx.out << metrics.dump(2) << '\n';
  return kOk;
}

int cmd_predict(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  require(cfg.input, "input");
  auto loaded = load_for(ctx);
  Model& model = loaded.model;
  const std::size_t e = model.config.embedding_dim;
  const auto old_precision = ctx.out.precision(6);
  ctx.out << std::fixed;
  if (model.config.task == Task::relatedness) {
    const auto pairs = read_pair_examples(cfg.input);
    if (pairs.empty()) return kOk;
    auto table = load_table(cfg, vocabulary(std::span(pairs)), e, loaded.embeddings, ctx.err);
    const auto scores = predict_scores(model, table, pairs, cfg.threads);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      ctx.out << pairs[i].id << '\t' << scores[i] << '\n';
    }
  } else {
    const auto trees = parse_conll_file(cfg.input);
    if (trees.empty()) return kOk;
    auto table = load_table(cfg, vocabulary(std::span(trees)), e, loaded.embeddings, ctx.err);
    for (const auto& t : trees) {
      const auto dist = sentiment_distribution(model, table, t);
      const std::size_t label = predict_label(dist);
      ctx.out << label << '\t' << dist[label] << '\n';
    }
  }
  ctx.out.unsetf(std::ios::floatfield);
  ctx.out.precision(old_precision);
  return kOk;
}

int cmd_rank(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  auto loaded = load_for(ctx);
  Model& model = loaded.model;
  if (model.config.task != Task::relatedness) {
    throw DataError("rank needs a relatedness checkpoint");
  }
  const auto queries = parse_conll_file(require(cfg.query, "query"));
  if (queries.empty()) throw DataError("query file holds no sentence");
  const auto corpus = parse_conll_file(require(cfg.corpus, "corpus"));
  if (corpus.empty()) throw DataError("corpus file holds no sentence");
  if (cfg.k == 0) throw UsageError("--k must be positive");

  auto vocab = vocabulary(std::span(corpus));
  vocab.merge(vocabulary(std::span(queries).first(1)));
  auto table = load_table(cfg, vocab, model.config.embedding_dim, loaded.embeddings, ctx.err);
  const auto hits = retrieve_similar(model, table, queries.front(), corpus, cfg.k, cfg.threads);

  json results = json::array();
  for (std::size_t r = 0; r < hits.size(); ++r) {
    results.push_back({{"rank", r + 1},
                       {"index", hits[r].index},
                       {"score", hits[r].score},
                       {"sentence", sentence_text(corpus[hits[r].index])}});
  }
  json doc{{"query", sentence_text(queries.front())}, {"results", results}};
  if (!cfg.out.empty()) {
    fs::create_directories(cfg.out);
    write_text(cfg.out / "rank.json", doc.dump(2) + "\n");
  }
  ctx.out << doc.dump(2) << '\n';
  return kOk;
}

int cmd_inspect_relations(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  auto loaded = load_for(ctx);
  const Model& model = loaded.model;
  if (!model.config.typed) {
    ctx.err << "warning: checkpoint is an untyped model; its relation gate was never trained\n";
  }
  const auto report = relation_magnitudes(model);
  const double residual = analogy_residual(model, "nsubj", "nmod", "dobj", "nsubjpass");
  json analogy{{"a", "nsubj"}, {"b", "nmod"}, {"c", "dobj"}, {"d", "nsubjpass"},
               {"residual", residual}};

  std::ostringstream tsv;
  write_relation_report(tsv, report);
  if (!cfg.out.empty()) {
    fs::create_directories(cfg.out);
    write_text(cfg.out / "relations.tsv", tsv.str());
    write_text(cfg.out / "analogy.json", analogy.dump(2) + "\n");
  }
  ctx.out << tsv.str() << "# analogy nsubj-nmod vs dobj-nsubjpass residual " << residual << '\n';
  return kOk;
}

int cmd_gradcheck(Context& ctx) {
  ModelGradCheckOptions opts;
  opts.memory_dim = ctx.settings.contains("dim") ? ctx.cfg.dim : 8;
  opts.embedding_dim = ctx.settings.contains("embedding_dim") ? ctx.cfg.embedding_dim : 10;
  opts.hidden_dim = ctx.settings.contains("hidden_dim") ? ctx.cfg.hidden_dim : 8;
  opts.seed = ctx.cfg.seed;
  opts.check.analytic_bias = ctx.inject_gradient_error;
  if (opts.memory_dim == 0 || opts.embedding_dim == 0 || opts.hidden_dim == 0) {
    throw UsageError("gradcheck dimensions must be positive");
  }

  const auto start = std::chrono::steady_clock::now();
  const auto report = model_grad_check(opts);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  constexpr double kThreshold = 1e-4;
  auto part = [](const GradCheckReport& r) {
    return json{{"max_relative_error", r.max_relative_error},
                {"worst_parameter", r.worst_parameter},
                {"worst_index", r.worst_index},
                {"analytic", r.worst_analytic},
                {"numeric", r.worst_numeric},
                {"elements", r.elements_checked}};
  };
  const bool passed = report.max_relative_error() < kThreshold;
  json doc{{"dim", opts.memory_dim},
           {"embedding_dim", opts.embedding_dim},
           {"classes", opts.classes},
           {"tree_size", opts.tree_size},
           {"seed", opts.seed},
           {"relatedness", part(report.relatedness)},
           {"sentiment", part(report.sentiment)},
           {"max_relative_error", report.max_relative_error()},
           {"threshold", kThreshold},
           {"passed", passed}};
  ctx.out << doc.dump(2) << '\n';
  ctx.err << "gradcheck took " << seconds << " s\n";
  return passed ? kOk : kNumericError;
}

}  // namespace

ModelConfig RunConfig::model_config(std::size_t embedding) const {
  ModelConfig m;
  m.task = task;
  m.typed = typed;
  m.memory_dim = dim;
  m.embedding_dim = embedding;
  m.hidden_dim = hidden_dim;
  m.classes = task == Task::relatedness ? 5 : 2;
  m.gate = gate;
  m.regularize_relation_gate = regularize_relation_gate;
  return m;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.learning_rate = lr;
  t.batch_size = batch;
  t.weight_decay = weight_decay;
  t.patience = patience;
  t.max_epochs = max_epochs;
  t.seed = seed;
  t.fine_tune_embeddings = fine_tune_embeddings;
  t.threads = deterministic ? 1 : threads;
  return t;
}

Settings parse_config(std::istream& in) {
  Settings s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = fold_key(trim(line.substr(0, eq)));
    if (!setters().contains(key)) {
      throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    s[key] = trim(line.substr(eq + 1));
  }
  return s;
}

Settings read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  return parse_config(in);
}

RunConfig resolve_config(const Settings& settings) {
  RunConfig cfg;
  if (auto it = settings.find("task"); it != settings.end()) {
    setters().at("task")(cfg, "task", it->second);
  }
  if (cfg.task == Task::sentiment) {
    cfg.lr = 0.05;
    cfg.dim = 170;
  }
  for (const auto& [key, value] : settings) {
    auto it = setters().find(key);
    if (it == setters().end()) throw UsageError("unknown setting '" + key + "'");
    it->second(cfg, key, value);
  }
  return cfg;
}

void write_config(std::ostream& out, const RunConfig& c) {
  const auto old_precision = out.precision(17);
  out << "task = " << to_string(c.task) << '\n'
      << "typed = " << (c.typed ? "true" : "false") << '\n'
      << "gate = " << to_string(c.gate) << '\n'
      << "seed = " << c.seed << '\n'
      << "dim = " << c.dim << '\n'
      << "embedding_dim = " << c.embedding_dim << '\n'
      << "hidden_dim = " << c.hidden_dim << '\n'
      << "lr = " << c.lr << '\n'
      << "batch = " << c.batch << '\n'
      << "weight_decay = " << c.weight_decay << '\n'
      << "patience = " << c.patience << '\n'
      << "max_epochs = " << c.max_epochs << '\n'
      << "fine_tune_embeddings = " << (c.fine_tune_embeddings ? "true" : "false") << '\n'
      << "regularize_relation_gate = " << (c.regularize_relation_gate ? "true" : "false") << '\n'
      << "threads = " << c.threads << '\n'
      << "deterministic = " << (c.deterministic ? "true" : "false") << '\n';
  auto path = [&](const char* key, const fs::path& p) {
    if (!p.empty()) out << key << " = " << p.string() << '\n';
  };
  path("embeddings", c.embeddings);
  path("treebank", c.treebank);
  path("dataset", c.dataset);
  path("phrases", c.phrases);
  path("train", c.train);
  path("dev", c.dev);
  path("test", c.test);
  path("checkpoint", c.checkpoint);
  path("input", c.input);
  path("query", c.query);
  path("corpus", c.corpus);
  path("out", c.out);
  out << "split = " << c.split << '\n' << "k = " << c.k << '\n';
  out.precision(old_precision);
}

std::size_t detect_embedding_dim(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::size_t count = 0;
    for (std::string f; fields >> f;) ++count;
    if (count == 0) continue;
    if (count < 2) throw ParseError(1, "embedding line without values");
    return count - 1;
  }
  throw DataError("embedding file " + path.string() + " is empty");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Typed Dependency Tree-LSTM: training, evaluation and analysis", "tdlstm"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  std::string config_path;
  app.add_option("--config", config_path, "Flat key = value config file");

  Settings flags;
  std::map<std::string, CLI::Option*> options;
  bool deterministic = false;
  auto* det = app.add_flag("--deterministic", deterministic,
                           "Serial execution and zeroed wall-time column for reproducible runs");
  const std::map<std::string, std::string> help{
      {"task", "relatedness or sentiment"},
      {"typed", "true: Typed DT-LSTM, false: DT-LSTM baseline"},
      {"gate", "relation gate activation: sigmoid, tanh or relu"},
      {"seed", "random seed"},
      {"dim", "memory dimension d"},
      {"embedding_dim", "word vector size (default: read from the embedding file)"},
      {"hidden_dim", "relatedness comparison layer width"},
      {"lr", "Adagrad learning rate"},
      {"batch", "mini-batch size"},
      {"weight_decay", "L2 strength lambda"},
      {"patience", "early-stopping patience in epochs"},
      {"max_epochs", "epoch limit"},
      {"fine_tune_embeddings", "train word vectors too"},
      {"regularize_relation_gate", "include the relation gate matrix in the L2 term"},
      {"threads", "worker threads"},
      {"embeddings", "word vector text file"},
      {"treebank", "CoNLL treebank"},
      {"dataset", "relatedness TSV"},
      {"phrases", "sentiment phrase labels (JSON lines)"},
      {"train", "prepared training file"},
      {"dev", "prepared development file"},
      {"test", "prepared evaluation file"},
      {"checkpoint", "model checkpoint"},
      {"input", "input file for predict"},
      {"query", "CoNLL file whose first sentence is the query"},
      {"corpus", "CoNLL file of candidate sentences"},
      {"out", "output directory"},
      {"split", "split name used for prepared file names"},
      {"k", "number of results for rank"},
  };
  for (const auto& [key, _] : setters()) {
    if (key == "deterministic") continue;
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    auto it = help.find(key);
    options[key] = app.add_option(flag, flags[key], it == help.end() ? "" : it->second);
  }

  auto* prepare = app.add_subcommand("prepare", "Align a dataset with its parsed treebank");
  auto* train = app.add_subcommand("train", "Train a model and write checkpoint and history");
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a prepared split");
  auto* predict = app.add_subcommand("predict", "Score pairs or label sentences");
  auto* rank = app.add_subcommand("rank", "Retrieve the corpus sentences closest to a query");
  auto* inspect = app.add_subcommand("inspect-relations", "Rank relation embeddings by magnitude");
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the full model");
  double inject = 0.0;
  gradcheck->add_option("--inject-gradient-error", inject)->group("");
  for (auto* sub : {prepare, train, eval, predict, rank, inspect, gradcheck}) sub->fallthrough();

  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    Settings settings;
    if (!config_path.empty()) settings = read_config_file(config_path);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) settings[key] = flags[key];
    }
    if (det->count() > 0) settings["deterministic"] = deterministic ? "true" : "false";
    Context ctx{resolve_config(settings), settings, out, err, inject};

    if (prepare->parsed()) return cmd_prepare(ctx);
    if (train->parsed()) return cmd_train(ctx);
    if (eval->parsed()) return cmd_eval(ctx);
    if (predict->parsed()) return cmd_predict(ctx);
    if (rank->parsed()) return cmd_rank(ctx);
    if (inspect->parsed()) return cmd_inspect_relations(ctx);
    if (gradcheck->parsed()) return cmd_gradcheck(ctx);
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace tdlstm::cli
