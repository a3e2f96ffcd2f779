#include "tdlstm/optimizer.hpp"

#include <cmath>

namespace tdlstm {

void adagrad_step(std::span<Parameter* const> params, double learning_rate, double eps) {
  for (Parameter* p : params) {
    auto& value = p->value.values();
    auto& grad = p->grad.values();
    auto& accum = p->adagrad_accum.values();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      if (g == 0.0) continue;
      accum[i] += g * g;
      value[i] -= learning_rate * g / (std::sqrt(accum[i]) + eps);
      grad[i] = 0.0;
    }
  }
}

}  // namespace tdlstm
