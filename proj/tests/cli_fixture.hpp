#pragma once
// On-disk toy corpora and an in-process driver for the command-line tool.

#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "helpers.hpp"
#include "tdlstm/conll.hpp"
#include "tdlstm/datasets.hpp"

namespace testing_util {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

inline CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tdlstm");
  std::ostringstream out, err;
  CliResult r;
  r.code = tdlstm::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

inline std::string score_text(double s) {
  std::ostringstream o;
  o.precision(17);
  o << s;
  return o.str();
}

// Raw relatedness split: a treebank in A/B order plus the scored TSV.
inline void write_raw_pairs(const std::filesystem::path& dir, const std::string& name,
                            const std::vector<tdlstm::PairExample>& pairs) {
  std::vector<tdlstm::DepTree> trees;
  std::ostringstream tsv;
  tsv << "pair_ID\tsentence_A\tsentence_B\trelatedness_score\tentailment_judgment\n";
  auto text = [](const tdlstm::DepTree& t) {
    std::string s;
    for (const auto& w : t.forms()) s += (s.empty() ? "" : " ") + w;
    return s;
  };
  for (const auto& p : pairs) {
    trees.push_back(p.left);
    trees.push_back(p.right);
    tsv << p.id << '\t' << text(p.left) << '\t' << text(p.right) << '\t' << score_text(p.score)
        << "\tNEUTRAL\n";
  }
  std::ostringstream conll;
  tdlstm::write_conll(conll, trees);
  write_file(dir / (name + ".conll"), conll.str());
  write_file(dir / (name + ".tsv"), tsv.str());
}

// Toy relatedness corpus with prepared train/dev/test files.
struct RelatednessCorpus {
  TempDir dir;
  std::filesystem::path embeddings = dir / "vectors.txt";
  std::filesystem::path prepared = dir / "prepared";

  explicit RelatednessCorpus(std::uint64_t seed = 1, std::size_t train = 24, std::size_t dev = 10,
                             std::size_t emb_dim = 6) {
    std::mt19937_64 rng(seed);
    write_file(embeddings, embedding_text(emb_dim, seed));
    const std::vector<std::pair<std::string, std::size_t>> splits{
        {"train", train}, {"dev", dev}, {"test", dev}};
    for (const auto& [name, n] : splits) {
      write_raw_pairs(dir.path(), name, toy_pairs(n, rng));
      const auto r = run_cli({"prepare", "--task", "relatedness", "--treebank",
                              (dir / (name + ".conll")).string(), "--dataset",
                              (dir / (name + ".tsv")).string(), "--out", prepared.string(),
                              "--split", name});
      EXPECT_EQ(r.code, 0) << r.err;
    }
  }

  std::string split(const std::string& name) const { return (prepared / (name + ".conll")).string(); }

  // Flags for a small, fast training run.
  std::vector<std::string> train_args(const std::filesystem::path& out) const {
    return {"train",   "--task",       "relatedness",      "--train",      split("train"),
            "--dev",   split("dev"),   "--embeddings",     embeddings.string(),
            "--dim",   "6",            "--hidden-dim",     "4",
            "--max-epochs", "3",       "--batch",          "8",
            "--out",   out.string()};
  }
};

}  // namespace testing_util
