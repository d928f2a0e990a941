#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "support/unrolled_node.hpp"
#include "swarmsid/dataset.hpp"
#include "swarmsid/models.hpp"
#include "swarmsid/node.hpp"
#include "swarmsid/simulator.hpp"

using namespace swarmsid;

namespace {

NodeArchitecture tiny_arch(std::size_t hidden = 8) {
  NodeArchitecture a;
  a.hidden = hidden;
  return a;
}

// zero out one sub-network's parameters
void zero_net(const NodeArchitecture& arch, std::vector<double>& params, const std::string& prefix) {
  for (const ParamEntry& e : node_param_layout(arch).entries)
    if (e.name.rfind(prefix, 0) == 0)
      std::fill(params.begin() + static_cast<long>(e.offset),
                params.begin() + static_cast<long>(e.offset + shape_size(e.shape)), 0.0);
}

std::vector<Segment> segments_from(const Trajectory& traj, std::size_t len, std::size_t count) {
  return make_segments(traj, len, count);
}

// linear field inside the model class: dv = -0.3 v - 0.8 * mean_j(r_i - r_j)
StateDerivative linear_field(const SwarmState& s) {
  const std::size_t n = s.n_agents();
  StateDerivative d;
  d.d_positions = s.velocities;
  d.d_velocities.resize(n);
  Vec2 mean{};
  for (const Vec2& p : s.positions) mean += p;
  mean = mean * (1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 rel = (s.positions[i] - mean) * (static_cast<double>(n) / static_cast<double>(n - 1));
    d.d_velocities[i] = -0.3 * s.velocities[i] - 0.8 * rel;
  }
  return d;
}

}  // namespace

TEST_SUITE("node") {

TEST_CASE("node_rhs is permutation-equivariant") {
  const NodeArchitecture arch = tiny_arch();
  const std::vector<double> params = init_node_params(arch, 5);
  const SwarmState s = oracles::random_state(4);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  SwarmState p;
  p.time = s.time;
  for (std::size_t i : perm) {
    p.positions.push_back(s.positions[i]);
    p.velocities.push_back(s.velocities[i]);
  }
  const StateDerivative d0 = node_rhs(s, arch, params);
  const StateDerivative d1 = node_rhs(p, arch, params);
  for (std::size_t k = 0; k < perm.size(); ++k) {
    CHECK(d1.d_velocities[k].x == doctest::Approx(d0.d_velocities[perm[k]].x).epsilon(1e-12));
    CHECK(d1.d_velocities[k].y == doctest::Approx(d0.d_velocities[perm[k]].y).epsilon(1e-12));
  }
}

TEST_CASE("identical agents receive identical accelerations") {
  const NodeArchitecture arch = tiny_arch();
  const std::vector<double> params = init_node_params(arch, 6);
  SwarmState s = oracles::random_state(4);
  s.positions[1] = s.positions[0];
  s.velocities[1] = s.velocities[0];
  const StateDerivative d = node_rhs(s, arch, params);
  CHECK(d.d_velocities[0].x == doctest::Approx(d.d_velocities[1].x).epsilon(1e-12));
  CHECK(d.d_velocities[0].y == doctest::Approx(d.d_velocities[1].y).epsilon(1e-12));
}

TEST_CASE("with interaction and aggregation zeroed, only own velocity matters") {
  const NodeArchitecture arch = tiny_arch();
  std::vector<double> params = init_node_params(arch, 7);
  zero_net(arch, params, "interaction");
  zero_net(arch, params, "aggregation");
  SwarmState a = oracles::random_state(3);
  SwarmState b = a;
  b.positions[1] = {9.0, -4.0};  // move someone else
  b.positions[2] = {-7.0, 2.0};
  const StateDerivative da = node_rhs(a, arch, params);
  const StateDerivative db = node_rhs(b, arch, params);
  CHECK(da.d_velocities[0].x == doctest::Approx(db.d_velocities[0].x).epsilon(1e-14));
  CHECK(da.d_velocities[0].y == doctest::Approx(db.d_velocities[0].y).epsilon(1e-14));
}

TEST_CASE("interaction path is translation-invariant") {
  const NodeArchitecture arch = tiny_arch();
  const std::vector<double> params = init_node_params(arch, 8);
  const SwarmState s = oracles::random_state(5);
  SwarmState shifted = s;
  for (Vec2& p : shifted.positions) p += Vec2{11.0, -6.5};
  const StateDerivative d0 = node_rhs(s, arch, params);
  const StateDerivative d1 = node_rhs(shifted, arch, params);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(d1.d_velocities[i].x == doctest::Approx(d0.d_velocities[i].x).epsilon(1e-10));
    CHECK(d1.d_velocities[i].y == doctest::Approx(d0.d_velocities[i].y).epsilon(1e-10));
  }
}

TEST_CASE("kinematic identity: d_positions always equals the velocities") {
  const NodeArchitecture arch = tiny_arch();
  const std::vector<double> params = init_node_params(arch, 9);
  const SwarmState s = oracles::random_state(3);
  const StateDerivative d = node_rhs(s, arch, params);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(d.d_positions[i].x == s.velocities[i].x);
    CHECK(d.d_positions[i].y == s.velocities[i].y);
  }
}

TEST_CASE("odesolve with a zero field holds the state constant") {
  const SwarmState s = oracles::random_state(2);
  const RhsFn zero = [](const SwarmState& x) {
    StateDerivative d;
    d.d_positions.assign(x.n_agents(), {0.0, 0.0});
    d.d_velocities.assign(x.n_agents(), {0.0, 0.0});
    return d;
  };
  const Trajectory t = odesolve(zero, s, 0.0, 1.0, 0.1);
  REQUIRE(t.size() == 11);
  for (const SwarmState& st : t.states) {
    CHECK(st.positions[0].x == s.positions[0].x);
    CHECK(st.velocities[1].y == s.velocities[1].y);
  }
}

TEST_CASE("odesolve reproduces exp(-1) on the scalar test field") {
  SwarmState x0;
  x0.positions = {{1.0, 0.0}};
  x0.velocities = {{0.0, 0.0}};
  const RhsFn decay = [](const SwarmState& x) {
    StateDerivative d;
    d.d_positions = {{-x.positions[0].x, 0.0}};
    d.d_velocities = {{0.0, 0.0}};
    return d;
  };
  const Trajectory t = odesolve(decay, x0, 0.0, 1.0, 1e-4);
  CHECK(std::abs(t.states.back().positions[0].x - std::exp(-1.0)) < 1e-3);
}

TEST_CASE("a 0.05 step over the unit interval takes 20 steps") {
  const SwarmState s = oracles::random_state(1);
  const RhsFn zero = [](const SwarmState& x) {
    StateDerivative d;
    d.d_positions.assign(x.n_agents(), {0.0, 0.0});
    d.d_velocities.assign(x.n_agents(), {0.0, 0.0});
    return d;
  };
  CHECK(odesolve(zero, s, 0.0, 1.0, 0.05).size() == 21);
  CHECK(odesolve(zero, s, 0.0, 0.0, 0.05).size() == 1);  // zero horizon
}

TEST_CASE("odesolve with the true dynamics matches the noise-free simulator exactly") {
  SwarmParams params;
  params.n_agents = 5;
  params.coupling = 1.0;
  params.noise_std = 0.0;
  params.dt = 0.05;
  params.n_steps = 50;
  const SwarmState ic = sample_initial_conditions(5, {}, 31);
  const Trajectory sim = simulate(params, ic);
  const Trajectory ode = odesolve([&params](const SwarmState& s) { return swarm_rhs(s, params); },
                                  ic, ic.time, ic.time + 50 * params.dt, params.dt);
  REQUIRE(ode.size() == sim.size());
  for (std::size_t k = 0; k < sim.size(); ++k)
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(ode.states[k].positions[i].x == sim.states[k].positions[i].x);
      CHECK(ode.states[k].positions[i].y == sim.states[k].positions[i].y);
      CHECK(ode.states[k].velocities[i].x == sim.states[k].velocities[i].x);
      CHECK(ode.states[k].velocities[i].y == sim.states[k].velocities[i].y);
    }
}

TEST_CASE("zero loss gradients yield zero parameter gradients") {
  const NodeArchitecture arch = tiny_arch();
  const std::vector<double> params = init_node_params(arch, 11);
  const SwarmState ic = oracles::random_state(3);
  const Trajectory fwd =
      odesolve([&](const SwarmState& s) { return node_rhs(s, arch, params); }, ic, 0.0, 0.5, 0.05);
  std::vector<std::vector<double>> grads(fwd.size(), std::vector<double>(12, 0.0));
  const std::vector<double> g = adjoint_backward(arch, params, fwd, grads);
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("adjoint gradients match the unrolled tape and finite differences") {
  const NodeArchitecture arch = tiny_arch(8);
  const std::vector<double> params = init_node_params(arch, 12);

  // a 3-agent, 10-step segment of true swarm data
  SwarmParams sp;
  sp.n_agents = 3;
  sp.coupling = 1.0;
  sp.noise_std = 1e-3;
  sp.dt = 0.05;
  sp.n_steps = 10;
  sp.seed = 2;
  const Trajectory observed = simulate(sp, sample_initial_conditions(3, {}, 2));
  const std::vector<SwarmState> obs(observed.states.begin(), observed.states.end());

  // forward solve and train-style loss gradients
  const std::size_t steps = obs.size() - 1;
  const Trajectory fwd =
      odesolve([&](const SwarmState& s) { return node_rhs(s, arch, params); }, obs[0], obs[0].time,
               obs[0].time + static_cast<double>(steps) * sp.dt, sp.dt);
  const double denom = static_cast<double>(steps * 4 * 3);
  std::vector<std::vector<double>> loss_grads(fwd.size());
  for (std::size_t k = 1; k < fwd.size(); ++k) {
    const auto pred = state_features(fwd.states[k]);
    const auto want = state_features(obs[k]);
    loss_grads[k].resize(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
      loss_grads[k][i] = 2.0 * (pred[i] - want[i]) / denom;
  }
  const std::vector<double> adjoint = adjoint_backward(arch, params, fwd, loss_grads);

  const std::vector<double> unrolled = oracles::unrolled_node_gradient(arch, params, obs, sp.dt);
  CHECK(oracles::max_rel_err(adjoint, unrolled) < 1e-6);

  const std::vector<double> fd = oracles::central_diff(
      [&](const std::vector<double>& p) { return oracles::segment_loss(arch, p, obs, sp.dt); },
      params, 1e-5);
  CHECK(oracles::max_rel_err(adjoint, fd) < 1e-3);
}

TEST_CASE("make_segments shares boundary states and respects the cap") {
  SwarmParams sp;
  sp.n_agents = 2;
  sp.noise_std = 0.01;
  sp.n_steps = 149;  // 150 states
  const Trajectory traj = simulate(sp, sample_initial_conditions(2, {}, 4));
  const auto segs = make_segments(traj, 50);
  REQUIRE(segs.size() == 2);  // starts at 0 and 50; 100 would need state 150
  CHECK(segs[0].states.size() == 51);
  CHECK(state_features(segs[0].states.back()) == state_features(segs[1].states.front()));
  CHECK(make_segments(traj, 50, 1).size() == 1);
  CHECK_THROWS_AS(make_segments(traj, 200), std::invalid_argument);
}

TEST_CASE("train_node rejects segments sampled at a different interval") {
  SwarmParams sp;
  sp.n_agents = 2;
  sp.noise_std = 0.0;
  sp.n_steps = 30;
  sp.dt = 0.1;
  const Trajectory traj = simulate(sp, sample_initial_conditions(2, {}, 4));
  NodeTrainConfig cfg;
  cfg.solver_step = 0.05;  // does not match the data
  cfg.epochs = 1;
  CHECK_THROWS_AS(train_node(segments_from(traj, 10, 1), tiny_arch(), cfg),
                  std::invalid_argument);
}

TEST_CASE("train_node learns a field from its own model class") {
  // data from the linear field, short segments from several starts
  std::vector<Segment> segments;
  for (std::uint64_t seed = 41; seed < 49; ++seed) {
    const SwarmState ic = sample_initial_conditions(3, {}, seed);
    const Trajectory traj = odesolve(linear_field, ic, 0.0, 30 * 0.05, 0.05);
    Segment seg;
    seg.states = traj.states;
    segments.push_back(std::move(seg));
  }
  NodeTrainConfig cfg;
  cfg.solver_step = 0.05;
  cfg.learning_rate = 0.01;
  cfg.epochs = 3000;
  cfg.seed = 1;
  const NodeArchitecture arch = tiny_arch(16);
  const NodeTrainResult r = train_node(segments, arch, cfg);
  CHECK(r.learning_curve.size() == 3000);
  CHECK(r.learning_curve.back() < 1e-4 * r.learning_curve.front());

  auto rollout_err = [&](std::uint64_t seed) {
    const SwarmState ic = sample_initial_conditions(3, {}, seed);
    const Trajectory truth = odesolve(linear_field, ic, 0.0, 30 * 0.05, 0.05);
    const Trajectory learned = node_rollout(arch, r.params, ic, 30, 0.05);
    double worst = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k)
      for (std::size_t i = 0; i < 3; ++i) {
        worst =
            std::max(worst, (truth.states[k].positions[i] - learned.states[k].positions[i]).norm());
        worst = std::max(worst,
                         (truth.states[k].velocities[i] - learned.states[k].velocities[i]).norm());
      }
    return worst;
  };
  CHECK(rollout_err(41) < 1e-2);   // reproduces a training trajectory
  CHECK(rollout_err(99) < 0.1);    // stays close on an unseen start
}

TEST_CASE("training is deterministic per seed") {
  SwarmParams sp;
  sp.n_agents = 2;
  sp.noise_std = 1e-3;
  sp.n_steps = 40;
  const Trajectory traj = simulate(sp, sample_initial_conditions(2, {}, 6));
  NodeTrainConfig cfg;
  cfg.solver_step = sp.dt;
  cfg.epochs = 10;
  cfg.seed = 17;
  const auto a = train_node(segments_from(traj, 20, 2), tiny_arch(), cfg);
  const auto b = train_node(segments_from(traj, 20, 2), tiny_arch(), cfg);
  CHECK(a.learning_curve == b.learning_curve);
  CHECK(a.params == b.params);
}

TEST_CASE("parameters are independent of the swarm size") {
  const NodeArchitecture arch = tiny_arch();
  const std::vector<double> params = init_node_params(arch, 3);
  // the same parameter vector drives 3-agent and 32-agent swarms
  CHECK_NOTHROW(node_rhs(oracles::random_state(3), arch, params));
  CHECK_NOTHROW(node_rhs(oracles::random_state(32), arch, params));
  const Trajectory roll = node_rollout(arch, params, oracles::random_state(32), 3, 0.05);
  CHECK(roll.size() == 4);
}

TEST_CASE("node model files round-trip") {
  const NodeArchitecture arch = tiny_arch(12);
  const std::vector<double> params = init_node_params(arch, 8);
  const std::string path = "/tmp/swarmsid_test_node.txt";
  save_node_model(path, arch, params);
  const auto [back_arch, back_params] = load_node_model(path);
  CHECK(back_arch.hidden == 12);
  CHECK(back_params == params);
}

TEST_CASE("horizon zero rollout returns only the initial state") {
  const NodeArchitecture arch = tiny_arch();
  const std::vector<double> params = init_node_params(arch, 2);
  const SwarmState ic = oracles::random_state(3);
  const Trajectory t = node_rollout(arch, params, ic, 0, 0.05);
  REQUIRE(t.size() == 1);
  CHECK(t.states[0].positions[0].x == ic.positions[0].x);
}

}  // TEST_SUITE
