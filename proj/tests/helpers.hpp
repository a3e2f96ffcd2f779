#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "tdlstm/conll.hpp"
#include "tdlstm/datasets.hpp"
#include "tdlstm/embeddings.hpp"
#include "tdlstm/graph.hpp"
#include "tdlstm/model.hpp"
#include "tdlstm/synthetic.hpp"

namespace testing_util {

// "1 Dogs 2 nsubj\n2 ran 0 root" style text -> tree.
inline tdlstm::DepTree tree(const std::string& conll) {
  std::istringstream in(conll);
  auto trees = tdlstm::parse_conll(in);
  EXPECT_EQ(trees.size(), 1u);
  return trees.at(0);
}

inline std::vector<double> vec(const tdlstm::Graph& g, tdlstm::Var v) { return g.value(v).values(); }

inline void randomize(tdlstm::Parameter& p, std::mt19937_64& rng, double bound = 0.5) {
  tdlstm::fill_uniform(p.value, bound, rng);
}

inline void randomize_all(tdlstm::Model& m, std::mt19937_64& rng, double bound = 0.5) {
  for (auto* p : m.cell.parameters()) randomize(*p, rng, bound);
  for (auto* p : m.gate.parameters()) randomize(*p, rng, bound);
  for (auto* p : m.relatedness.parameters()) randomize(*p, rng, bound);
  for (auto* p : m.sentiment.parameters()) randomize(*p, rng, bound);
}

inline const std::vector<std::string>& words() {
  static const std::vector<std::string> w{"a", "black", "cat", "dog", "is", "man", "playing",
                                          "runs", "the", "woman", "guitar", "sits"};
  return w;
}

inline const std::vector<std::string>& relations() {
  static const std::vector<std::string> r{"nsubj", "dobj", "det", "amod", "advmod",
                                          "nmod", "aux", "case", "conj", "cc"};
  return r;
}

inline tdlstm::EmbeddingTable random_table(std::size_t dim, std::mt19937_64& rng,
                                           const std::vector<std::string>& vocab = words()) {
  std::vector<std::string> sorted = vocab;
  std::sort(sorted.begin(), sorted.end());
  tdlstm::Tensor m = tdlstm::Tensor::matrix(sorted.size(), dim);
  tdlstm::fill_uniform(m, 0.5, rng);
  return tdlstm::EmbeddingTable(sorted, std::move(m));
}

inline tdlstm::ModelConfig small_config(tdlstm::Task task, std::size_t d, std::size_t e) {
  tdlstm::ModelConfig c;
  c.task = task;
  c.memory_dim = d;
  c.embedding_dim = e;
  c.hidden_dim = 6;
  c.classes = task == tdlstm::Task::relatedness ? 5 : 2;
  return c;
}

// Relatedness toy data: score grows with word overlap, so it is learnable.
inline std::vector<tdlstm::PairExample> toy_pairs(std::size_t n, std::mt19937_64& rng) {
  std::vector<tdlstm::PairExample> out;
  std::uniform_int_distribution<std::size_t> len(2, 5);
  for (std::size_t i = 0; i < n; ++i) {
    tdlstm::PairExample p;
    p.id = std::to_string(i + 1);
    p.left = tdlstm::random_dep_tree(len(rng), rng, words(), relations());
    p.right = tdlstm::random_dep_tree(len(rng), rng, words(), relations());
    std::set<std::string> a, b;
    for (const auto& t : p.left.tokens()) a.insert(t.form);
    for (const auto& t : p.right.tokens()) b.insert(t.form);
    std::size_t shared = 0;
    for (const auto& w : a) shared += b.count(w);
    const double jac = static_cast<double>(shared) / static_cast<double>(a.size() + b.size() - shared);
    p.score = 1.0 + 4.0 * jac;
    out.push_back(std::move(p));
  }
  return out;
}

// Embedding text file holding every word of words() except the last one.
inline std::string embedding_text(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::ostringstream out;
  out.precision(17);
  for (std::size_t w = 0; w + 1 < words().size(); ++w) {
    out << words()[w];
    for (std::size_t k = 0; k < dim; ++k) out << ' ' << u(rng);
    out << '\n';
  }
  return out.str();
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("tdlstm_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace testing_util
