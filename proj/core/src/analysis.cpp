#include "tdlstm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "parallel.hpp"
#include "tdlstm/error.hpp"
#include "tdlstm/inference.hpp"

namespace tdlstm {

namespace {

std::vector<double> gate_column(const Model& model, const std::string& label) {
  auto idx = model.inventory.find(label);
  if (!idx) throw std::invalid_argument("unknown relation '" + label + "'");
  const Tensor& w = model.gate.w.value;
  std::vector<double> col(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) col[r] = w.at(r, *idx);
  return col;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::vector<RelationMagnitude> relation_magnitudes(const Model& model) {
  const Tensor& w = model.gate.w.value;
  std::vector<RelationMagnitude> out;
  out.reserve(model.inventory.size());
  for (std::size_t j = 0; j < model.inventory.size(); ++j) {
    double s = 0.0;
    for (std::size_t r = 0; r < w.rows(); ++r) s += w.at(r, j) * w.at(r, j);
    out.push_back({model.inventory.label(j), std::sqrt(s)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.magnitude > b.magnitude; });
  return out;
}

void write_relation_report(std::ostream& out, std::span<const RelationMagnitude> report) {
  const auto old_precision = out.precision(10);
  out << "label\tmagnitude\n";
  for (const auto& r : report) out << r.label << '\t' << r.magnitude << '\n';
  out.precision(old_precision);
}

double analogy_residual(const Model& model, const std::string& a, const std::string& b,
                        const std::string& c, const std::string& d) {
  const auto wa = gate_column(model, a);
  const auto wb = gate_column(model, b);
  const auto wc = gate_column(model, c);
  const auto wd = gate_column(model, d);
  std::vector<double> left(wa.size()), right(wa.size()), diff(wa.size());
  for (std::size_t i = 0; i < wa.size(); ++i) {
    left[i] = wa[i] - wb[i];
    right[i] = wc[i] - wd[i];
    diff[i] = left[i] - right[i];
  }
  const double scale = 0.5 * (norm(left) + norm(right));
  if (scale == 0.0) return 0.0;
  return norm(diff) / scale;
}

std::vector<RetrievalHit> retrieve_similar(Model& model, EmbeddingTable& embeddings,
                                           const DepTree& query, std::span<const DepTree> corpus,
                                           std::size_t k, std::size_t threads) {
  if (corpus.empty()) throw std::invalid_argument("retrieve_similar: empty corpus");
  std::vector<RetrievalHit> hits(corpus.size());
  detail::parallel_for(corpus.size(), threads, [&](std::size_t i) {
    hits[i] = {i, predict_score(model, embeddings, query, corpus[i])};
  });
  std::stable_sort(hits.begin(), hits.end(),
                   [](const auto& x, const auto& y) { return x.score > y.score; });
  hits.resize(std::min(k, hits.size()));
  return hits;
}

std::vector<double> mean_vector_sentence(std::span<const std::string> tokens,
                                         const EmbeddingTable& embeddings) {
  if (tokens.empty()) throw std::invalid_argument("mean_vector_sentence: empty sentence");
  std::vector<double> mean(embeddings.dim(), 0.0);
  for (const auto& t : tokens) {
    const auto v = embeddings.vector(t);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
  }
  for (auto& x : mean) x /= static_cast<double>(tokens.size());
  return mean;
}

}  // namespace tdlstm
