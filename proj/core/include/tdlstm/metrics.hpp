#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace tdlstm {

// Sample Pearson correlation. Throws NumericError when either side has zero
// variance and std::invalid_argument for fewer than two points or unequal
// lengths.
double pearson(std::span<const double> xs, std::span<const double> ys);
double mean_squared_error(std::span<const double> predicted, std::span<const double> gold);

struct RelatednessMetrics {
  std::optional<double> pearson;  // empty when undefined (constant predictions)
  double mse = 0.0;
};

RelatednessMetrics relatedness_metrics(std::span<const double> predicted,
                                       std::span<const double> gold);

// Binary metrics with class 1 as positive. Precision (recall) is 0 when no
// positives are predicted (present).
struct BinaryMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

BinaryMetrics binary_metrics(std::span<const std::size_t> predicted,
                             std::span<const std::size_t> gold);

}  // namespace tdlstm
