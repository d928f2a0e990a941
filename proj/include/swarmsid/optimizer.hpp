#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace swarmsid {

enum class OptimKind { Sgd, Adam };

/// Gradient-descent state over a flat parameter vector. Adam uses the
/// standard bias-corrected update with beta1=0.9, beta2=0.999, eps=1e-8.
struct OptimizerState {
  OptimKind kind = OptimKind::Sgd;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t step_count = 0;
  std::vector<double> m, v;  // Adam moments, sized on first step

  static OptimizerState sgd(double lr);
  static OptimizerState adam(double lr);

  /// In-place update; throws ShapeError if grads and params disagree.
  void step(std::vector<double>& params, std::span<const double> grads);
};

}  // namespace swarmsid
