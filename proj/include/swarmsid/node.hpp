#pragma once

#include <functional>
#include <span>
#include <string>

#include "swarmsid/params.hpp"
#include "swarmsid/trajectory.hpp"

namespace swarmsid {

/// Physics-informed vector field: d_positions is the kinematic identity, and
/// each agent's acceleration is
///
///   intrinsic_net(vx, vy, |v|^2 vx, |v|^2 vy)
///     + aggregation_net( mean_{j != i} interaction_net(r_i - r_j) )
///
/// with all three sub-networks shared across agents and pairs, so the
/// parameter count does not depend on N. Each sub-network is three linear
/// layers with tanh between them. With a single agent the pairwise mean is
/// empty and enters the aggregation net as zero.
struct NodeArchitecture {
  std::size_t hidden = 64;

  void validate() const;
};

ParamLayout node_param_layout(const NodeArchitecture& arch);
std::vector<double> init_node_params(const NodeArchitecture& arch, std::uint64_t seed);

/// Learned swarm dynamics at one state.
StateDerivative node_rhs(const SwarmState& state, const NodeArchitecture& arch,
                         std::span<const double> params);

using RhsFn = std::function<StateDerivative(const SwarmState&)>;

/// Fixed-step noise-free Euler integration over [t0, t1]; the step count is
/// round((t1 - t0) / step), so t1 == t0 yields the single initial state.
Trajectory odesolve(const RhsFn& rhs, const SwarmState& x0, double t0, double t1, double step);

/// Discrete adjoint of the Euler scheme over a stored forward trajectory.
/// loss_grad_at_states[k] holds dL/dstate_k in state_features ordering
/// ([x, y, vx, vy] per agent); entry 0 is ignored (the initial state is
/// given, not predicted). Returns dL/dtheta, flat.
///
/// Because the adjoint uses the same discretization as the forward solve, the
/// result matches reverse-mode differentiation of the unrolled steps.
std::vector<double> adjoint_backward(const NodeArchitecture& arch, std::span<const double> params,
                                     const Trajectory& forward_traj,
                                     const std::vector<std::vector<double>>& loss_grad_at_states);

/// Observed sub-trajectory used as one training unit.
struct Segment {
  std::vector<SwarmState> states;
};

/// Consecutive segments of segment_len steps (segment_len + 1 states, sharing
/// boundary states), capped at max_segments; 0 means as many as fit.
std::vector<Segment> make_segments(const Trajectory& traj, std::size_t segment_len,
                                   std::size_t max_segments = 0);

struct NodeTrainConfig {
  double solver_step = 0.05;
  double learning_rate = 0.01;  // Adam
  std::size_t epochs = 400;
  std::uint64_t seed = 0;
};

struct NodeTrainResult {
  std::vector<double> params;
  std::vector<double> learning_curve;  // MSE per epoch, before each update
};

/// Per epoch: solve each segment forward from its first state, evaluate MSE
/// against the observed states, accumulate adjoint gradients, take one Adam
/// step. Deterministic for a fixed seed.
NodeTrainResult train_node(const std::vector<Segment>& segments, const NodeArchitecture& arch,
                           const NodeTrainConfig& config);

/// Integrates the learned field from ic for n_steps of size step.
Trajectory node_rollout(const NodeArchitecture& arch, std::span<const double> params,
                        const SwarmState& ic, std::size_t n_steps, double step);

void save_node_model(const std::string& path, const NodeArchitecture& arch,
                     std::span<const double> params);
std::pair<NodeArchitecture, std::vector<double>> load_node_model(const std::string& path);

}  // namespace swarmsid
