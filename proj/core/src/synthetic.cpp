#include "tdlstm/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "tdlstm/embeddings.hpp"
#include "tdlstm/heads.hpp"
#include "tdlstm/model.hpp"
#include "tdlstm/tree_encoder.hpp"

namespace tdlstm {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

void randomize(Parameter& p, std::mt19937_64& rng) { fill_uniform(p.value, 0.5, rng); }

}  // namespace

DepTree random_dep_tree(std::size_t n, std::mt19937_64& rng, std::span<const std::string> words,
                        std::span<const std::string> relations) {
  if (n == 0 || words.empty() || relations.empty()) {
    throw std::invalid_argument("random_dep_tree: need n >= 1, words and relations");
  }
  // Attach tokens in a random order, each to an already attached token.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<DepToken> tokens(n);
  for (std::size_t k = 0; k < n; ++k) {
    DepToken& t = tokens[order[k] - 1];
    t.index = order[k];
    t.form = words[pick(rng, words.size())];
    if (k == 0) {
      t.head = 0;
      t.deprel = "root";
    } else {
      t.head = order[pick(rng, k)];
      t.deprel = relations[pick(rng, relations.size())];
    }
  }
  return DepTree::build(std::move(tokens));
}

ModelGradCheckReport model_grad_check(const ModelGradCheckOptions& options) {
  std::mt19937_64 rng(options.seed);
  ModelConfig cfg;
  cfg.task = Task::relatedness;
  cfg.memory_dim = options.memory_dim;
  cfg.embedding_dim = options.embedding_dim;
  cfg.hidden_dim = options.hidden_dim;
  cfg.classes = options.classes;
  Model model = Model::create(cfg, options.seed);
  model.sentiment = SentimentHead::create(cfg.memory_dim, 2, rng);

  std::vector<Parameter*> shared = model.cell.parameters();
  shared.push_back(&model.gate.w);
  shared.push_back(&model.gate.b);
  for (Parameter* p : shared) randomize(*p, rng);
  for (Parameter* p : model.relatedness.parameters()) randomize(*p, rng);
  for (Parameter* p : model.sentiment.parameters()) randomize(*p, rng);

  const std::vector<std::string> words{"dogs", "chase", "the", "red", "ball", "quickly"};
  const std::vector<std::string> relations{"nsubj", "dobj", "det", "amod", "advmod", "nmod"};
  Tensor table = Tensor::matrix(words.size(), cfg.embedding_dim);
  fill_uniform(table, 0.5, rng);
  std::vector<std::string> sorted_words = words;
  std::sort(sorted_words.begin(), sorted_words.end());
  EmbeddingTable embeddings(sorted_words, std::move(table));

  const DepTree left = random_dep_tree(options.tree_size, rng, words, relations);
  const DepTree right = random_dep_tree(options.tree_size, rng, words, relations);
  const double gold = std::uniform_real_distribution<double>(1.0, static_cast<double>(cfg.classes))(rng);

  EncoderOptions enc;
  enc.train_embeddings = true;

  auto params_for = [&](auto head_params) {
    std::vector<Parameter*> out = shared;
    out.insert(out.end(), head_params.begin(), head_params.end());
    out.push_back(&embeddings.parameter());
    return out;
  };

  ModelGradCheckReport report;
  {
    auto params = params_for(model.relatedness.parameters());
    LossBuilder build = [&](Graph& g) {
      auto l = encode_tree(g, model.cell, model.gate, left, embeddings, model.inventory, enc);
      auto r = encode_tree(g, model.cell, model.gate, right, embeddings, model.inventory, enc);
      const ScoredPair pair{l.sentence, r.sentence, gold};
      return relatedness_loss(g, model.relatedness, std::span(&pair, 1), options.weight_decay,
                              params);
    };
    report.relatedness = grad_check(build, params, options.check);
  }
  {
    auto params = params_for(model.sentiment.parameters());
    std::vector<std::pair<std::size_t, std::size_t>> labels;
    for (std::size_t node = 1; node <= left.size(); node += 2) labels.emplace_back(node, pick(rng, 2));
    LossBuilder build = [&](Graph& g) {
      auto enc_left = encode_tree(g, model.cell, model.gate, left, embeddings, model.inventory, enc);
      std::vector<LabeledHidden> nodes;
      for (auto [node, label] : labels) nodes.push_back({enc_left.states[node - 1].h, label});
      return sentiment_loss(g, model.sentiment, nodes, options.weight_decay, params);
    };
    report.sentiment = grad_check(build, params, options.check);
  }
  return report;
}

}  // namespace tdlstm
