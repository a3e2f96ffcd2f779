#pragma once

#include <span>

#include "tdlstm/tensor.hpp"

namespace tdlstm {

// Per element: accum += g^2; value -= lr * g / (sqrt(accum) + eps). Gradients
// are zeroed afterwards. Any weight decay must already be part of g.
void adagrad_step(std::span<Parameter* const> params, double learning_rate, double eps = 1e-8);

}  // namespace tdlstm
