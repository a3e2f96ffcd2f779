#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cli_fixture.hpp"
#include "json.hpp"

using namespace tdlstm;
using namespace testing_util;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- config

TEST(Config, ParsesCommentsDashesAndBlankLines) {
  std::istringstream in("# header\ntask = sentiment\n\nmax-epochs = 7  # trailing\nlr=0.5\n");
  auto s = cli::parse_config(in);
  EXPECT_EQ(s.at("task"), "sentiment");
  EXPECT_EQ(s.at("max_epochs"), "7");
  EXPECT_EQ(s.at("lr"), "0.5");
}

TEST(Config, RejectsUnknownKeysAndBadLines) {
  std::istringstream unknown("learning_rate = 0.1\n");
  EXPECT_THROW(cli::parse_config(unknown), std::invalid_argument);
  std::istringstream no_eq("task sentiment\n");
  EXPECT_THROW(cli::parse_config(no_eq), std::invalid_argument);
  EXPECT_THROW(cli::resolve_config({{"dim", "ten"}}), std::invalid_argument);
  EXPECT_THROW(cli::resolve_config({{"typed", "maybe"}}), std::invalid_argument);
  EXPECT_THROW(cli::resolve_config({{"task", "parsing"}}), std::invalid_argument);
}

TEST(Config, TaskDefaults) {
  auto rel = cli::resolve_config({});
  EXPECT_EQ(rel.task, Task::relatedness);
  EXPECT_EQ(rel.lr, 0.25);
  EXPECT_EQ(rel.batch, 25u);
  EXPECT_EQ(rel.dim, 150u);
  EXPECT_EQ(rel.weight_decay, 1e-4);
  EXPECT_EQ(rel.patience, 10u);
  EXPECT_TRUE(rel.typed);

  auto sst = cli::resolve_config({{"task", "sentiment"}});
  EXPECT_EQ(sst.lr, 0.05);
  EXPECT_EQ(sst.dim, 170u);
  EXPECT_EQ(sst.batch, 25u);

  auto tuned = cli::resolve_config({{"task", "sentiment"}, {"lr", "0.1"}});
  EXPECT_EQ(tuned.lr, 0.1);
  EXPECT_EQ(tuned.dim, 170u);
}

TEST(Config, WrittenConfigReadsBack) {
  auto cfg = cli::resolve_config({{"task", "sentiment"}, {"typed", "false"}, {"lr", "0.0123"},
                                  {"gate", "tanh"}, {"out", "/tmp/x"}, {"k", "7"}});
  std::stringstream buf;
  cli::write_config(buf, cfg);
  auto again = cli::resolve_config(cli::parse_config(buf));
  EXPECT_EQ(again.task, cfg.task);
  EXPECT_EQ(again.typed, cfg.typed);
  EXPECT_EQ(again.lr, cfg.lr);
  EXPECT_EQ(again.gate, cfg.gate);
  EXPECT_EQ(again.out, cfg.out);
  EXPECT_EQ(again.k, cfg.k);
  EXPECT_EQ(again.dim, cfg.dim);
}

TEST(Config, FlagsOverrideFile) {
  TempDir dir;
  write_file(dir / "run.cfg", "dim = 5\nembedding_dim = 4\nhidden_dim = 3\n");
  auto from_file = run_cli({"gradcheck", "--config", (dir / "run.cfg").string()});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(json::parse(from_file.out)["dim"], 5);
  auto overridden = run_cli({"gradcheck", "--config", (dir / "run.cfg").string(), "--dim", "6"});
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_EQ(json::parse(overridden.out)["dim"], 6);
  EXPECT_EQ(json::parse(overridden.out)["embedding_dim"], 4);
}

// ---------------------------------------------------------------- usage errors

TEST(Usage, ErrorsExitOne) {
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 1);
  EXPECT_EQ(run_cli({"gradcheck", "--no-such-flag"}).code, 1);
  EXPECT_EQ(run_cli({"gradcheck", "--task", "parsing"}).code, 1);
  EXPECT_EQ(run_cli({"gradcheck", "--config", "/nonexistent.cfg"}).code, 1);
  auto r = run_cli({"train", "--task", "relatedness"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--out"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli({"eval"}).code, 1);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Usage, InvalidTrainingSettingExitsOne) {
  RelatednessCorpus corpus;
  TempDir out;
  auto args = corpus.train_args(out.path());
  args.insert(args.end(), {"--patience", "0"});
  EXPECT_EQ(run_cli(args).code, 1);
}

// ---------------------------------------------------------------- prepare

TEST(Prepare, AlignsThreePairsWithSixTrees) {
  TempDir dir;
  std::mt19937_64 rng(1);
  auto pairs = toy_pairs(3, rng);
  write_raw_pairs(dir.path(), "raw", pairs);
  auto r = run_cli({"prepare", "--task", "relatedness", "--treebank", (dir / "raw.conll").string(),
                    "--dataset", (dir / "raw.tsv").string(), "--out", (dir / "p").string(),
                    "--split", "mini"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto stats = json::parse(r.out);
  EXPECT_EQ(stats["examples"], 3);
  EXPECT_EQ(stats["trees"], 6);
  EXPECT_TRUE(fs::exists(dir / "p" / "mini.stats.json"));
  auto again = read_pair_examples(dir / "p" / "mini.conll");
  ASSERT_EQ(again.size(), 3u);
  EXPECT_EQ(again[1].score, pairs[1].score);
}

TEST(Prepare, FiveTreesForThreePairsExitsTwo) {
  TempDir dir;
  std::mt19937_64 rng(2);
  auto pairs = toy_pairs(3, rng);
  write_raw_pairs(dir.path(), "raw", pairs);
  auto text = read_file(dir / "raw.conll");
  // Drop the last sentence block.
  const auto cut = text.rfind("\n\n", text.size() - 3);
  write_file(dir / "raw.conll", text.substr(0, cut + 2));
  auto r = run_cli({"prepare", "--task", "relatedness", "--treebank", (dir / "raw.conll").string(),
                    "--dataset", (dir / "raw.tsv").string(), "--out", (dir / "p").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("alignment"), std::string::npos) << r.err;
}

TEST(Prepare, MalformedTreebankReportsLine) {
  TempDir dir;
  write_file(dir / "bad.conll", "1\ta\t0\troot\n2\tb\tX\tdep\n");
  write_file(dir / "d.tsv", "pair_ID\tsentence_A\tsentence_B\trelatedness_score\n1\ta\tb\t3\n");
  auto r = run_cli({"prepare", "--treebank", (dir / "bad.conll").string(), "--dataset",
                    (dir / "d.tsv").string(), "--out", (dir / "p").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST(Prepare, SentimentPhraseStats) {
  TempDir dir;
  write_file(dir / "t.conll",
             "1\tgood\t2\tamod\n2\tfilm\t0\troot\n\n1\tbad\t2\tamod\n2\tplot\t0\troot\n\n");
  write_file(dir / "p.jsonl",
             "{\"tokens\": [\"good\", \"film\"], \"label\": 1}\n"
             "{\"tokens\": [\"good\"], \"label\": 1}\n"
             "{\"tokens\": [\"bad\"], \"label\": 0}\n"
             "{\"tokens\": [\"bad\"], \"label\": 0}\n");
  auto r = run_cli({"prepare", "--task", "sentiment", "--treebank", (dir / "t.conll").string(),
                    "--phrases", (dir / "p.jsonl").string(), "--out", (dir / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto stats = json::parse(r.out);
  EXPECT_EQ(stats["trees"], 2);
  EXPECT_EQ(stats["nodes"], 4);
  EXPECT_EQ(stats["labeled_nodes"], 3);
  EXPECT_EQ(stats["trees_with_root_label"], 1);
  EXPECT_EQ(stats["duplicate_phrases"], 1);
  EXPECT_DOUBLE_EQ(stats["coverage"].get<double>(), 0.75);
}

// ---------------------------------------------------------------- train / eval / predict

class TrainedRelatedness : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    corpus_ = new RelatednessCorpus(3);
    run_dir_ = new TempDir();
    auto args = corpus_->train_args(run_dir_->path());
    args.push_back("--deterministic");
    train_ = new CliResult(run_cli(args));
  }
  static void TearDownTestSuite() {
    delete train_;
    delete run_dir_;
    delete corpus_;
  }
  static std::string checkpoint() { return (run_dir_->path() / "model.json").string(); }
  std::vector<std::string> with_model(std::vector<std::string> args) const {
    args.insert(args.end(), {"--checkpoint", checkpoint(), "--embeddings", corpus_->embeddings.string()});
    return args;
  }

  static RelatednessCorpus* corpus_;
  static TempDir* run_dir_;
  static CliResult* train_;
};

RelatednessCorpus* TrainedRelatedness::corpus_ = nullptr;
TempDir* TrainedRelatedness::run_dir_ = nullptr;
CliResult* TrainedRelatedness::train_ = nullptr;

TEST_F(TrainedRelatedness, WritesRunArtifacts) {
  ASSERT_EQ(train_->code, 0) << train_->err;
  for (const char* f : {"model.json", "history.csv", "timing.csv", "config.txt", "train_metrics.json"})
    EXPECT_TRUE(fs::exists(run_dir_->path() / f)) << f;
  auto history = lines(read_file(run_dir_->path() / "history.csv"));
  ASSERT_EQ(history.size(), 4u);
  EXPECT_EQ(history[0], "epoch,train_loss,dev_metric,seconds");
  for (std::size_t i = 1; i < history.size(); ++i) EXPECT_EQ(history[i].substr(history[i].rfind(',')), ",0");
  auto summary = json::parse(train_->out);
  EXPECT_EQ(summary["epochs"], 3);
  auto cfg = cli::read_config_file(run_dir_->path() / "config.txt");
  EXPECT_EQ(cfg.at("dim"), "6");
  EXPECT_EQ(cfg.at("deterministic"), "true");
}

TEST_F(TrainedRelatedness, EvalOnTrainReproducesTrainMetrics) {
  auto r = run_cli(with_model({"eval", "--test", corpus_->split("train")}));
  ASSERT_EQ(r.code, 0) << r.err;
  auto m = json::parse(r.out);
  auto stored = json::parse(read_file(run_dir_->path() / "train_metrics.json"));
  EXPECT_NEAR(m["pearson"].get<double>(), stored["pearson"].get<double>(), 1e-9);
  EXPECT_NEAR(m["mse"].get<double>(), stored["mse"].get<double>(), 1e-9);
  EXPECT_EQ(m["examples"], 24);
}

TEST_F(TrainedRelatedness, EvalOnDevMatchesBestDevMetric) {
  TempDir out;
  auto r = run_cli(with_model({"eval", "--test", corpus_->split("dev"), "--out", out.path().string()}));
  ASSERT_EQ(r.code, 0) << r.err;
  auto summary = json::parse(train_->out);
  EXPECT_EQ(json::parse(r.out)["pearson"].get<double>(), summary["best_dev_metric"].get<double>());
  EXPECT_TRUE(fs::exists(out / "metrics.json"));
}

TEST_F(TrainedRelatedness, MismatchedCheckpointSettingsExitTwo) {
  auto r = run_cli(with_model({"eval", "--test", corpus_->split("dev"), "--dim", "9"}));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("memory_dim"), std::string::npos);
  EXPECT_EQ(run_cli(with_model({"eval", "--test", corpus_->split("dev"), "--task", "sentiment"})).code, 2);
}

TEST_F(TrainedRelatedness, PredictScoresEveryPairInRange) {
  auto r = run_cli(with_model({"predict", "--input", corpus_->split("test")}));
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(r.out);
  auto pairs = read_pair_examples(corpus_->split("test"));
  ASSERT_EQ(rows.size(), pairs.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto tab = rows[i].find('\t');
    EXPECT_EQ(rows[i].substr(0, tab), pairs[i].id);
    const double s = std::stod(rows[i].substr(tab + 1));
    EXPECT_GE(s, 1.0);
    EXPECT_LE(s, 5.0);
  }
}

TEST_F(TrainedRelatedness, PredictOnEmptyInputPrintsNothing) {
  TempDir dir;
  write_file(dir / "empty.conll", "");
  auto r = run_cli(with_model({"predict", "--input", (dir / "empty.conll").string()}));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "");
}

TEST_F(TrainedRelatedness, RankReturnsKSortedResults) {
  TempDir dir;
  auto trees = parse_conll_file(corpus_->split("test"));
  std::ostringstream q;
  write_conll(q, std::span(trees).first(1));
  write_file(dir / "q.conll", q.str());
  auto r = run_cli(with_model({"rank", "--query", (dir / "q.conll").string(), "--corpus",
                               corpus_->split("test"), "--k", "4", "--out", dir.path().string()}));
  ASSERT_EQ(r.code, 0) << r.err;
  auto doc = json::parse(r.out);
  ASSERT_EQ(doc["results"].size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(doc["results"][i]["rank"], i + 1);
    if (i > 0) EXPECT_GE(doc["results"][i - 1]["score"].get<double>(), doc["results"][i]["score"].get<double>());
  }
  EXPECT_TRUE(fs::exists(dir / "rank.json"));
  EXPECT_EQ(run_cli(with_model({"rank", "--query", (dir / "q.conll").string(), "--corpus",
                                corpus_->split("test"), "--k", "0"}))
                .code,
            1);
}

TEST_F(TrainedRelatedness, InspectRelationsListsWholeInventory) {
  TempDir dir;
  auto r = run_cli({"inspect-relations", "--checkpoint", checkpoint(), "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 1u + 47u + 1u);
  EXPECT_EQ(rows[0], "label\tmagnitude");
  EXPECT_EQ(rows.back().rfind("# analogy", 0), 0u);
  EXPECT_EQ(lines(read_file(dir / "relations.tsv")).size(), 48u);
  auto analogy = json::parse(read_file(dir / "analogy.json"));
  EXPECT_GE(analogy["residual"].get<double>(), 0.0);
}

TEST_F(TrainedRelatedness, CorruptedCheckpointNamesField) {
  TempDir dir;
  auto text = read_file(checkpoint());
  const auto at = text.find("\"cell.w_i\"");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 10, "\"cell.w_x\"");
  write_file(dir / "bad.json", text);
  auto r = run_cli({"eval", "--checkpoint", (dir / "bad.json").string(), "--test",
                    corpus_->split("dev"), "--embeddings", corpus_->embeddings.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("parameters.cell.w_i"), std::string::npos) << r.err;
}

TEST(Train, DeterministicRunsAreByteIdentical) {
  RelatednessCorpus corpus(4);
  TempDir a, b;
  auto args_a = corpus.train_args(a.path());
  auto args_b = corpus.train_args(b.path());
  args_a.push_back("--deterministic");
  args_b.insert(args_b.end(), {"--deterministic", "--threads", "4"});
  ASSERT_EQ(run_cli(args_a).code, 0);
  ASSERT_EQ(run_cli(args_b).code, 0);
  EXPECT_EQ(read_file(a / "history.csv"), read_file(b / "history.csv"));
  EXPECT_EQ(read_file(a / "model.json"), read_file(b / "model.json"));
}

TEST(Train, SentimentEndToEnd) {
  TempDir dir;
  std::mt19937_64 rng(5);
  std::vector<DepTree> trees;
  std::ostringstream phrases;
  for (int i = 0; i < 16; ++i) {
    auto t = random_dep_tree(3, rng, words(), relations());
    const int label = i % 2;
    phrases << "{\"tokens\": [";
    const auto forms = t.forms();
    for (std::size_t k = 0; k < forms.size(); ++k) phrases << (k ? ", " : "") << '"' << forms[k] << '"';
    phrases << "], \"label\": " << label << "}\n";
    trees.push_back(std::move(t));
  }
  std::ostringstream conll;
  write_conll(conll, trees);
  write_file(dir / "t.conll", conll.str());
  write_file(dir / "p.jsonl", phrases.str());
  write_file(dir / "vec.txt", embedding_text(5, 5));
  ASSERT_EQ(run_cli({"prepare", "--task", "sentiment", "--treebank", (dir / "t.conll").string(),
                     "--phrases", (dir / "p.jsonl").string(), "--out", (dir / "p").string(),
                     "--split", "all"})
                .code,
            0);
  const std::string split = (dir / "p" / "all.conll").string();
  auto tr = run_cli({"train", "--task", "sentiment", "--train", split, "--dev", split, "--embeddings",
                     (dir / "vec.txt").string(), "--dim", "5", "--max-epochs", "2", "--out",
                     (dir / "run").string(), "--fine-tune-embeddings", "true"});
  ASSERT_EQ(tr.code, 0) << tr.err;
  auto ev = run_cli({"eval", "--checkpoint", (dir / "run" / "model.json").string(), "--test", split,
                     "--embeddings", (dir / "vec.txt").string()});
  ASSERT_EQ(ev.code, 0) << ev.err;
  auto m = json::parse(ev.out);
  for (const char* k : {"accuracy", "precision", "recall", "f1"}) {
    EXPECT_GE(m[k].get<double>(), 0.0);
    EXPECT_LE(m[k].get<double>(), 1.0);
  }
  EXPECT_EQ(json::parse(tr.out)["best_dev_metric"].get<double>(), m["accuracy"].get<double>());

  auto pr = run_cli({"predict", "--checkpoint", (dir / "run" / "model.json").string(), "--input",
                     (dir / "t.conll").string(), "--embeddings", (dir / "vec.txt").string()});
  ASSERT_EQ(pr.code, 0) << pr.err;
  auto rows = lines(pr.out);
  ASSERT_EQ(rows.size(), 16u);
  for (const auto& row : rows) {
    EXPECT_TRUE(row[0] == '0' || row[0] == '1');
    EXPECT_GE(std::stod(row.substr(2)), 0.5);
  }
}

// ---------------------------------------------------------------- gradcheck

TEST(GradCheckCommand, PassesAndIsRepeatable) {
  auto a = run_cli({"gradcheck"});
  auto b = run_cli({"gradcheck"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto doc = json::parse(a.out);
  EXPECT_TRUE(doc["passed"].get<bool>());
  EXPECT_LT(doc["max_relative_error"].get<double>(), 1e-4);
  EXPECT_EQ(doc["dim"], 8);
}

TEST(GradCheckCommand, InjectedErrorExitsThree) {
  auto r = run_cli({"gradcheck", "--inject-gradient-error", "1e-3"});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(json::parse(r.out)["passed"].get<bool>());
}
