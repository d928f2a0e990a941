#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <variant>

#include "swarmsid/trajectory.hpp"

namespace swarmsid {

/// Raised when an integration or rollout produces non-finite or runaway values.
struct BlowupError : std::runtime_error {
  std::size_t step_index;
  BlowupError(const std::string& msg, std::size_t step) : std::runtime_error(msg), step_index(step) {}
};

/// Component magnitude beyond which a simulation is aborted as diverged.
inline constexpr double kBlowupLimit = 1e6;

struct InitRanges {
  Vec2 pos_min{-1.0, -1.0}, pos_max{1.0, 1.0};
  Vec2 vel_min{-1.0, -1.0}, vel_max{1.0, 1.0};
  void validate() const;
};

/// One explicit Euler step; noise_draws holds 2N standard normals (vx, vy per
/// agent) that perturb the velocities only, scaled per params.noise_scaling.
SwarmState euler_step(const SwarmState& state, const SwarmParams& params,
                      std::span<const double> noise_draws);

/// Integrates params.n_steps Euler steps from ic; returns n_steps + 1 states.
/// Fully determined by (params.seed, ic); noise-free runs ignore the seed.
Trajectory simulate(const SwarmParams& params, const SwarmState& ic);

/// Uniform i.i.d. positions and velocities inside the boxes, seeded.
SwarmState sample_initial_conditions(std::size_t n_agents, const InitRanges& ranges,
                                     std::uint64_t seed);

struct FixedIndexSplit {
  std::size_t index = 0;
};

/// Finds the first step from which the pooled ring-radius cv of every
/// subsequent sliding window stays below the threshold.
struct AutoDetectSplit {
  std::size_t window = 50;
  double ring_cv_threshold = 0.1;
};

using SplitPolicy = std::variant<FixedIndexSplit, AutoDetectSplit>;

/// Splits into (prefix, suffix) by state count; concatenation reproduces the
/// input exactly. AutoDetect throws if no steady segment exists.
std::pair<Trajectory, Trajectory> split_transient_steady(const Trajectory& traj,
                                                         const SplitPolicy& policy);

}  // namespace swarmsid
