#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "tdlstm/graph.hpp"
#include "tdlstm/heads.hpp"
#include "tdlstm/model.hpp"
#include "tdlstm/synthetic.hpp"
#include "tdlstm/trainer.hpp"
#include "tdlstm/tree_encoder.hpp"

using namespace tdlstm;

namespace {

const std::vector<std::string>& vocab() {
  static const std::vector<std::string> w = [] {
    std::vector<std::string> out;
    for (int i = 0; i < 200; ++i) out.push_back("w" + std::to_string(i));
    return out;
  }();
  return w;
}

const std::vector<std::string>& labels() {
  static const std::vector<std::string> r{"nsubj", "dobj", "det", "amod", "nmod", "case", "aux",
                                          "advmod", "conj", "cc", "compound", "mark"};
  return r;
}

EmbeddingTable table(std::size_t e, std::mt19937_64& rng) {
  std::vector<std::string> words = vocab();
  std::sort(words.begin(), words.end());
  Tensor m = Tensor::matrix(words.size(), e);
  fill_uniform(m, 0.5, rng);
  return EmbeddingTable(words, std::move(m));
}

ModelConfig config(std::size_t d, std::size_t e) {
  ModelConfig c;
  c.memory_dim = d;
  c.embedding_dim = e;
  return c;
}

// args: memory dim, tree size
void BM_EncodeTree(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(1);
  Model m = Model::create(config(d, 300), 1);
  auto emb = table(300, rng);
  auto tree = random_dep_tree(n, rng, vocab(), labels());
  for (auto _ : state) {
    Graph g;
    auto enc = encode_tree(g, m.cell, m.gate, tree, emb, m.inventory);
    benchmark::DoNotOptimize(g.value(enc.sentence).values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EncodeTree)->Args({50, 10})->Args({150, 10})->Args({150, 20})->Args({170, 20});

void BM_PairForwardBackward(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  Model m = Model::create(config(d, 300), 2);
  auto emb = table(300, rng);
  auto left = random_dep_tree(10, rng, vocab(), labels());
  auto right = random_dep_tree(10, rng, vocab(), labels());
  for (auto _ : state) {
    Graph g;
    auto l = encode_tree(g, m.cell, m.gate, left, emb, m.inventory);
    auto r = encode_tree(g, m.cell, m.gate, right, emb, m.inventory);
    Var loss = relatedness_divergence(g, m.relatedness, {l.sentence, r.sentence, 3.6});
    g.backward(loss);
  }
  for (auto* p : m.parameters()) p->zero_grad();
}
BENCHMARK(BM_PairForwardBackward)->Arg(50)->Arg(150);

// One mini-batch of 25 pairs, gradient accumulation included.
void BM_RelatednessBatch(benchmark::State& state) {
  std::mt19937_64 rng(3);
  Model m = Model::create(config(150, 300), 3);
  auto emb = table(300, rng);
  std::vector<PairExample> pairs(25);
  for (auto& p : pairs) {
    p.left = random_dep_tree(10, rng, vocab(), labels());
    p.right = random_dep_tree(10, rng, vocab(), labels());
    p.score = 3.0;
  }
  std::vector<const PairExample*> batch;
  for (const auto& p : pairs) batch.push_back(&p);
  TrainConfig tc;
  tc.threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(accumulate_relatedness_batch(m, emb, batch, tc));
    for (auto* p : m.parameters()) p->zero_grad();
  }
}
BENCHMARK(BM_RelatednessBatch)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
