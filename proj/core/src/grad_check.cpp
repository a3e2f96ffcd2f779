#include "tdlstm/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tdlstm {

namespace {

double evaluate(const LossBuilder& build_loss) {
  Graph graph;
  return graph.scalar(build_loss(graph));
}

}  // namespace

GradCheckReport grad_check(const LossBuilder& build_loss, std::span<Parameter* const> params,
                           const GradCheckOptions& options) {
  if (!(options.eps > 0.0)) throw std::invalid_argument("grad_check: eps must be positive");
  for (Parameter* p : params) p->zero_grad();
  {
    Graph graph;
    graph.backward(build_loss(graph));
  }
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (Parameter* p : params) {
    analytic.push_back(p->grad);
    p->zero_grad();
  }

  GradCheckReport report;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + options.eps;
      const double up = evaluate(build_loss);
      p.value[i] = saved - options.eps;
      const double down = evaluate(build_loss);
      p.value[i] = saved;

      const double numeric = (up - down) / (2.0 * options.eps);
      const double a = analytic[k][i] + options.analytic_bias;
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      ++report.elements_checked;
      if (rel > report.max_relative_error || report.worst_parameter.empty()) {
        report.max_relative_error = rel;
        report.worst_parameter = p.name;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace tdlstm
