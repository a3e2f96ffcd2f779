#pragma once

#include <functional>
#include <span>
#include <string>

#include "tdlstm/graph.hpp"

namespace tdlstm {

// Records a scalar loss on the given graph. Must be deterministic in the
// parameter values.
using LossBuilder = std::function<Var(Graph&)>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t elements_checked = 0;
};

struct GradCheckOptions {
  double eps = 1e-5;
  // Added to every analytic gradient entry before comparison. Negative
  // control only; leave at zero.
  double analytic_bias = 0.0;
};

// Central-difference check of every element of every parameter. Relative
// error per element is |a - n| / max(|a|, |n|, 1e-8). Parameter grads are
// left zeroed on return.
GradCheckReport grad_check(const LossBuilder& build_loss, std::span<Parameter* const> params,
                           const GradCheckOptions& options = {});

}  // namespace tdlstm
