#include "swarmsid/optimizer.hpp"

#include <cmath>
#include <sstream>

#include "swarmsid/array.hpp"

namespace swarmsid {

OptimizerState OptimizerState::sgd(double lr) {
  OptimizerState s;
  s.kind = OptimKind::Sgd;
  s.learning_rate = lr;
  return s;
}

OptimizerState OptimizerState::adam(double lr) {
  OptimizerState s;
  s.kind = OptimKind::Adam;
  s.learning_rate = lr;
  return s;
}

void OptimizerState::step(std::vector<double>& params, std::span<const double> grads) {
  if (params.size() != grads.size()) {
    std::ostringstream os;
    os << "optimizer_step: params size " << params.size() << " vs grads size " << grads.size();
    throw ShapeError(os.str());
  }
  ++step_count;
  if (kind == OptimKind::Sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * grads[i];
    return;
  }
  if (m.size() != params.size()) {
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
  }
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
    params[i] -= learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

}  // namespace swarmsid
