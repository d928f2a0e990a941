#include "swarmsid/simulator.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace swarmsid {

void InitRanges::validate() const {
  if (pos_min.x > pos_max.x || pos_min.y > pos_max.y || vel_min.x > vel_max.x ||
      vel_min.y > vel_max.y)
    throw std::invalid_argument("init ranges: min exceeds max");
}

SwarmState euler_step(const SwarmState& state, const SwarmParams& params,
                      std::span<const double> noise_draws) {
  const std::size_t n = state.n_agents();
  if (noise_draws.size() != 2 * n) {
    std::ostringstream os;
    os << "euler_step: expected " << 2 * n << " noise draws, got " << noise_draws.size();
    throw std::invalid_argument(os.str());
  }
  const double dt = params.dt;
  const double noise_scale =
      params.noise_std * (params.noise_scaling == NoiseScaling::SqrtDt ? std::sqrt(dt) : dt);
  const StateDerivative d = swarm_rhs(state, params);

  SwarmState next;
  next.positions.resize(n);
  next.velocities.resize(n);
  next.time = state.time + dt;
  for (std::size_t i = 0; i < n; ++i) {
    next.positions[i] = state.positions[i] + dt * d.d_positions[i];
    next.velocities[i] =
        state.velocities[i] + dt * d.d_velocities[i] +
        noise_scale * Vec2{noise_draws[2 * i], noise_draws[2 * i + 1]};
  }
  if (!next.all_finite()) throw BlowupError("euler_step produced non-finite state", 0);
  return next;
}

namespace {
bool within_limit(const SwarmState& s) {
  for (const Vec2& p : s.positions)
    if (std::abs(p.x) > kBlowupLimit || std::abs(p.y) > kBlowupLimit) return false;
  for (const Vec2& v : s.velocities)
    if (std::abs(v.x) > kBlowupLimit || std::abs(v.y) > kBlowupLimit) return false;
  return true;
}
}  // namespace

Trajectory simulate(const SwarmParams& params, const SwarmState& ic) {
  params.validate();
  ic.validate();
  if (ic.n_agents() != params.n_agents)
    throw std::invalid_argument("initial condition does not match params.n_agents");

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> draws(2 * params.n_agents);

  Trajectory traj;
  traj.dt = params.dt;
  traj.params_used = params;
  traj.states.reserve(params.n_steps + 1);
  traj.states.push_back(ic);
  for (std::size_t k = 0; k < params.n_steps; ++k) {
    for (double& d : draws) d = params.noise_std > 0.0 ? normal(rng) : 0.0;
    SwarmState next;
    try {
      next = euler_step(traj.states.back(), params, draws);
    } catch (const BlowupError&) {
      std::ostringstream os;
      os << "simulation blew up at step " << k + 1 << " (non-finite state)";
      throw BlowupError(os.str(), k + 1);
    }
    if (!within_limit(next)) {
      std::ostringstream os;
      os << "simulation blew up at step " << k + 1 << " (|component| > " << kBlowupLimit << ")";
      throw BlowupError(os.str(), k + 1);
    }
    traj.states.push_back(std::move(next));
  }
  return traj;
}

SwarmState sample_initial_conditions(std::size_t n_agents, const InitRanges& ranges,
                                     std::uint64_t seed) {
  ranges.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> px(ranges.pos_min.x, ranges.pos_max.x);
  std::uniform_real_distribution<double> py(ranges.pos_min.y, ranges.pos_max.y);
  std::uniform_real_distribution<double> vx(ranges.vel_min.x, ranges.vel_max.x);
  std::uniform_real_distribution<double> vy(ranges.vel_min.y, ranges.vel_max.y);
  SwarmState s;
  s.positions.resize(n_agents);
  s.velocities.resize(n_agents);
  for (Vec2& p : s.positions) p = {px(rng), py(rng)};
  for (Vec2& v : s.velocities) v = {vx(rng), vy(rng)};
  return s;
}

namespace {

// pooled ring-radius cv over states [begin, begin+window)
double window_ring_cv(const Trajectory& traj, std::size_t begin, std::size_t window) {
  double sum = 0.0, sq = 0.0;
  std::size_t m = 0;
  for (std::size_t k = begin; k < begin + window; ++k) {
    const SwarmState& s = traj.states[k];
    Vec2 mf{};
    for (const Vec2& p : s.positions) mf += p;
    mf = mf * (1.0 / static_cast<double>(s.n_agents()));
    for (const Vec2& p : s.positions) {
      const double r = (p - mf).norm();
      sum += r;
      sq += r * r;
      ++m;
    }
  }
  const double mean = sum / static_cast<double>(m);
  if (mean <= 0.0) return 0.0;
  const double var = std::max(0.0, sq / static_cast<double>(m) - mean * mean);
  return std::sqrt(var) / mean;
}

Trajectory slice_traj(const Trajectory& traj, std::size_t begin, std::size_t end) {
  Trajectory out;
  out.dt = traj.dt;
  out.params_used = traj.params_used;
  out.states.assign(traj.states.begin() + static_cast<long>(begin),
                    traj.states.begin() + static_cast<long>(end));
  return out;
}

}  // namespace

std::pair<Trajectory, Trajectory> split_transient_steady(const Trajectory& traj,
                                                         const SplitPolicy& policy) {
  if (traj.empty()) throw std::invalid_argument("cannot split an empty trajectory");
  std::size_t split = 0;
  if (const auto* fixed = std::get_if<FixedIndexSplit>(&policy)) {
    if (fixed->index > traj.size())
      throw std::invalid_argument("split index exceeds trajectory length");
    split = fixed->index;
  } else {
    const auto& autod = std::get<AutoDetectSplit>(policy);
    if (traj.size() < autod.window)
      throw std::runtime_error("auto-detect split: trajectory shorter than the detection window");
    const std::size_t last = traj.size() - autod.window;
    // first k whose window and every later window stay below the threshold
    std::size_t first_ok = last + 1;
    for (std::size_t k = last + 1; k-- > 0;) {
      if (window_ring_cv(traj, k, autod.window) <= autod.ring_cv_threshold)
        first_ok = k;
      else
        break;
    }
    if (first_ok > last) {
      std::ostringstream os;
      os << "auto-detect split: ring_radius_cv never stays below " << autod.ring_cv_threshold
         << " over a window of " << autod.window;
      throw std::runtime_error(os.str());
    }
    split = first_ok;
  }
  return {slice_traj(traj, 0, split), slice_traj(traj, split, traj.size())};
}

}  // namespace swarmsid
