#include "tdlstm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tdlstm/error.hpp"

namespace tdlstm {

namespace {

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("metric inputs differ in length");
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
  require_same_length(xs.size(), ys.size());
  if (xs.size() < 2) throw std::invalid_argument("pearson needs at least two points");
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericError("pearson: zero variance");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double mean_squared_error(std::span<const double> predicted, std::span<const double> gold) {
  require_same_length(predicted.size(), gold.size());
  if (predicted.empty()) throw std::invalid_argument("mse of an empty set");
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - gold[i];
    total += d * d;
  }
  return total / static_cast<double>(predicted.size());
}

RelatednessMetrics relatedness_metrics(std::span<const double> predicted,
                                       std::span<const double> gold) {
  RelatednessMetrics m;
  m.mse = mean_squared_error(predicted, gold);
  try {
    m.pearson = pearson(predicted, gold);
  } catch (const NumericError&) {
    m.pearson.reset();
  }
  return m;
}

BinaryMetrics binary_metrics(std::span<const std::size_t> predicted,
                             std::span<const std::size_t> gold) {
  require_same_length(predicted.size(), gold.size());
  if (predicted.empty()) throw std::invalid_argument("binary metrics of an empty set");
  std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == gold[i]) ++correct;
    if (predicted[i] == 1 && gold[i] == 1) ++tp;
    if (predicted[i] == 1 && gold[i] != 1) ++fp;
    if (predicted[i] != 1 && gold[i] == 1) ++fn;
  }
  BinaryMetrics m;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(predicted.size());
  m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = m.precision + m.recall == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

}  // namespace tdlstm
