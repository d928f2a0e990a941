#include "swarmsid/swarm.hpp"

#include <sstream>
#include <stdexcept>

namespace swarmsid {

void SwarmParams::validate() const {
  if (n_agents < 1) throw std::invalid_argument("n_agents must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (coupling < 0.0) throw std::invalid_argument("coupling must be >= 0");
  if (noise_std < 0.0) throw std::invalid_argument("noise_std must be >= 0");
}

bool SwarmState::all_finite() const {
  for (const Vec2& p : positions)
    if (!p.finite()) return false;
  for (const Vec2& v : velocities)
    if (!v.finite()) return false;
  return std::isfinite(time);
}

void SwarmState::validate() const {
  if (positions.size() != velocities.size()) {
    std::ostringstream os;
    os << "state has " << positions.size() << " positions but " << velocities.size()
       << " velocities";
    throw std::invalid_argument(os.str());
  }
  if (!all_finite()) throw std::invalid_argument("state has non-finite components");
}

Vec2 intrinsic_accel(Vec2 v) { return (1.0 - v.norm2()) * v; }

Vec2 interaction_accel(std::size_t i, const SwarmState& state, const SwarmParams& params) {
  const std::size_t n = state.n_agents();
  if (i >= n) throw std::out_of_range("agent index out of range");
  Vec2 sum{};
  const Vec2 ri = state.positions[i];
  for (std::size_t j = 0; j < n; ++j) sum += ri - state.positions[j];
  return sum * (-params.coupling / static_cast<double>(n));
}

StateDerivative swarm_rhs(const SwarmState& state, const SwarmParams& params) {
  const std::size_t n = state.n_agents();
  StateDerivative d;
  d.d_positions = state.velocities;
  d.d_velocities.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    d.d_velocities[i] = intrinsic_accel(state.velocities[i]) + interaction_accel(i, state, params);
  return d;
}

}  // namespace swarmsid
