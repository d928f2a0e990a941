#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace swarmsid {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double c) const { return {x * c, y * c}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 operator*(double c, Vec2 v) { return v * c; }

/// How velocity noise scales with the integration step. SqrtDt keeps the
/// diffusion dt-consistent (Euler-Maruyama); Dt reproduces a plain-Euler
/// treatment of the noise term.
enum class NoiseScaling { SqrtDt, Dt };

struct SwarmParams {
  std::size_t n_agents = 32;
  double coupling = 1.0;  // attraction strength toward the mean position
  double noise_std = 0.0;
  double dt = 0.05;
  std::size_t n_steps = 1000;
  std::uint64_t seed = 0;
  NoiseScaling noise_scaling = NoiseScaling::SqrtDt;

  void validate() const;  // throws std::invalid_argument
};

/// Positions and velocities of all agents at one instant.
struct SwarmState {
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;
  double time = 0.0;

  std::size_t n_agents() const { return positions.size(); }
  bool all_finite() const;
  void validate() const;
};

struct StateDerivative {
  std::vector<Vec2> d_positions;
  std::vector<Vec2> d_velocities;
};

/// Self-propulsion term (1 - |v|^2) v: speeds relax toward 1.
Vec2 intrinsic_accel(Vec2 v);

/// Attraction of agent i toward the others: -(a/N) sum_j (r_i - r_j).
/// The j = i term contributes zero, so the sum runs over all agents.
Vec2 interaction_accel(std::size_t i, const SwarmState& state, const SwarmParams& params);

/// Deterministic part of the swarm dynamics; noise is the integrator's job.
StateDerivative swarm_rhs(const SwarmState& state, const SwarmParams& params);

}  // namespace swarmsid
