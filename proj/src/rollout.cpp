#include "swarmsid/rollout.hpp"

#include <cmath>
#include <sstream>

#include "swarmsid/dataset.hpp"
#include "swarmsid/simulator.hpp"

namespace swarmsid {

Trajectory rollout_with(const PredictFn& predict, const Array& seed_window, std::size_t n_steps,
                        double dt, double t_start) {
  if (seed_window.rank() != 2)
    throw ShapeError("rollout: seed window must be (window_len, 4N), got " +
                     seed_window.shape_str());
  const std::size_t width = seed_window.cols();
  Array window = seed_window;

  Trajectory traj;
  traj.dt = dt;
  traj.params_used.n_agents = width / 4;
  traj.params_used.dt = dt;
  traj.states.reserve(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const std::vector<double> pred = predict(window);
    if (pred.size() != width) {
      std::ostringstream os;
      os << "rollout: prediction width " << pred.size() << " does not match window width " << width;
      throw ShapeError(os.str());
    }
    for (double v : pred)
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "rollout produced a non-finite prediction at step " << k;
        throw BlowupError(os.str(), k);
      }
    traj.states.push_back(state_from_features(pred, t_start + static_cast<double>(k) * dt));
    // shift the window up one row and append the prediction
    std::copy(window.data.begin() + static_cast<long>(width), window.data.end(),
              window.data.begin());
    std::copy(pred.begin(), pred.end(), window.data.end() - static_cast<long>(width));
  }
  return traj;
}

}  // namespace swarmsid
