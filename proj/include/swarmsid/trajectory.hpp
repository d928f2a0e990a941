#pragma once

#include <vector>

#include "swarmsid/swarm.hpp"

namespace swarmsid {

/// Uniformly sampled state sequence; states[k].time == states[0].time + k*dt.
struct Trajectory {
  std::vector<SwarmState> states;
  double dt = 0.0;
  SwarmParams params_used;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
  std::size_t n_agents() const { return states.empty() ? 0 : states.front().n_agents(); }
};

}  // namespace swarmsid
