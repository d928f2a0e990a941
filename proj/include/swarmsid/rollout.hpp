#pragma once

#include <functional>

#include "swarmsid/array.hpp"
#include "swarmsid/trajectory.hpp"

namespace swarmsid {

using PredictFn = std::function<std::vector<double>(const Array& window)>;

/// Sliding-window autoregressive rollout: predict the next step from the
/// window, append the prediction to the window, repeat n_steps times. The
/// returned trajectory holds the predictions only, timed from t_start.
/// Throws BlowupError with the step index on a non-finite prediction.
Trajectory rollout_with(const PredictFn& predict, const Array& seed_window, std::size_t n_steps,
                        double dt, double t_start);

}  // namespace swarmsid
