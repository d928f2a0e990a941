#include "swarmsid/node.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

#include "swarmsid/dataset.hpp"
#include "swarmsid/models.hpp"
#include "swarmsid/optimizer.hpp"
#include "swarmsid/serialize.hpp"
#include "swarmsid/simulator.hpp"
#include "swarmsid/tape.hpp"

namespace swarmsid {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const RowMat>;
using Map = Eigen::Map<RowMat>;

constexpr std::size_t kIntrinsicIn = 4;
constexpr std::size_t kPairIn = 2;

struct NetOffsets {
  std::size_t w1, b1, w2, b2, w3, b3;
  std::size_t in, hidden;
};

NetOffsets net_offsets(const ParamLayout& layout, const std::string& prefix) {
  NetOffsets o{};
  for (const ParamEntry& e : layout.entries) {
    if (e.name == prefix + "_w1") {
      o.w1 = e.offset;
      o.in = e.shape[0];
      o.hidden = e.shape[1];
    } else if (e.name == prefix + "_b1")
      o.b1 = e.offset;
    else if (e.name == prefix + "_w2")
      o.w2 = e.offset;
    else if (e.name == prefix + "_b2")
      o.b2 = e.offset;
    else if (e.name == prefix + "_w3")
      o.w3 = e.offset;
    else if (e.name == prefix + "_b3")
      o.b3 = e.offset;
  }
  return o;
}

// three linear layers with tanh between; x is (B, in), result (B, 2)
RowMat apply_net3(std::span<const double> p, const NetOffsets& o, const RowMat& x) {
  const auto rows = x.rows();
  CMap w1(p.data() + o.w1, static_cast<Eigen::Index>(o.in), static_cast<Eigen::Index>(o.hidden));
  CMap w2(p.data() + o.w2, static_cast<Eigen::Index>(o.hidden), static_cast<Eigen::Index>(o.hidden));
  CMap w3(p.data() + o.w3, static_cast<Eigen::Index>(o.hidden), 2);

  RowMat h1 = x * w1;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < h1.cols(); ++c)
      h1(r, c) = std::tanh(h1(r, c) + p[o.b1 + static_cast<std::size_t>(c)]);
  RowMat h2 = h1 * w2;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < h2.cols(); ++c)
      h2(r, c) = std::tanh(h2(r, c) + p[o.b2 + static_cast<std::size_t>(c)]);
  RowMat out = h2 * w3;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < 2; ++c) out(r, c) += p[o.b3 + static_cast<std::size_t>(c)];
  return out;
}

// intrinsic features (vx, vy, |v|^2 vx, |v|^2 vy), term order matching the tape path
RowMat intrinsic_features(const SwarmState& s) {
  const std::size_t n = s.n_agents();
  RowMat f(static_cast<Eigen::Index>(n), 4);
  for (std::size_t i = 0; i < n; ++i) {
    const double vx = s.velocities[i].x, vy = s.velocities[i].y;
    f(static_cast<Eigen::Index>(i), 0) = vx;
    f(static_cast<Eigen::Index>(i), 1) = vy;
    f(static_cast<Eigen::Index>(i), 2) = vx * vx * vx + (vy * vy) * vx;
    f(static_cast<Eigen::Index>(i), 3) = vy * vy * vy + (vx * vx) * vy;
  }
  return f;
}

// averaging matrix (N, P) with 1/(N-1) on agent i's pair block
RowMat pair_average_matrix(std::size_t n) {
  const std::size_t pairs = n * (n - 1);
  RowMat avg = RowMat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pairs));
  const double w = 1.0 / static_cast<double>(n - 1);
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      avg(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = w;
      ++p;
    }
  return avg;
}

}  // namespace

void NodeArchitecture::validate() const {
  if (hidden == 0) throw std::invalid_argument("node architecture: hidden must be positive");
}

ParamLayout node_param_layout(const NodeArchitecture& arch) {
  arch.validate();
  ParamLayout l;
  auto add_net = [&l, &arch](const std::string& prefix, std::size_t in) {
    l.add(prefix + "_w1", {in, arch.hidden}, in);
    l.add(prefix + "_b1", {arch.hidden}, in);
    l.add(prefix + "_w2", {arch.hidden, arch.hidden}, arch.hidden);
    l.add(prefix + "_b2", {arch.hidden}, arch.hidden);
    l.add(prefix + "_w3", {arch.hidden, 2}, arch.hidden);
    l.add(prefix + "_b3", {2}, arch.hidden);
  };
  add_net("intrinsic", kIntrinsicIn);
  add_net("interaction", kPairIn);
  add_net("aggregation", kPairIn);
  return l;
}

std::vector<double> init_node_params(const NodeArchitecture& arch, std::uint64_t seed) {
  return init_params(node_param_layout(arch), seed);
}

StateDerivative node_rhs(const SwarmState& state, const NodeArchitecture& arch,
                         std::span<const double> params) {
  state.validate();
  const ParamLayout layout = node_param_layout(arch);
  if (params.size() != layout.total)
    throw ShapeError("node_rhs: parameter vector does not match the architecture");
  const std::size_t n = state.n_agents();
  const NetOffsets intr = net_offsets(layout, "intrinsic");
  const NetOffsets inter = net_offsets(layout, "interaction");
  const NetOffsets aggr = net_offsets(layout, "aggregation");

  const RowMat intr_out = apply_net3(params, intr, intrinsic_features(state));

  RowMat mean_io = RowMat::Zero(static_cast<Eigen::Index>(n), 2);
  if (n > 1) {
    const std::size_t pairs = n * (n - 1);
    RowMat d(static_cast<Eigen::Index>(pairs), 2);
    std::size_t p = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        d(static_cast<Eigen::Index>(p), 0) = state.positions[i].x - state.positions[j].x;
        d(static_cast<Eigen::Index>(p), 1) = state.positions[i].y - state.positions[j].y;
        ++p;
      }
    const RowMat io = apply_net3(params, inter, d);
    mean_io = pair_average_matrix(n) * io;
  }
  const RowMat agg_out = apply_net3(params, aggr, mean_io);

  StateDerivative out;
  out.d_positions = state.velocities;
  out.d_velocities.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.d_velocities[i] = {intr_out(static_cast<Eigen::Index>(i), 0) +
                               agg_out(static_cast<Eigen::Index>(i), 0),
                           intr_out(static_cast<Eigen::Index>(i), 1) +
                               agg_out(static_cast<Eigen::Index>(i), 1)};
  return out;
}

Trajectory odesolve(const RhsFn& rhs, const SwarmState& x0, double t0, double t1, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("odesolve: step must be > 0");
  if (t1 < t0) throw std::invalid_argument("odesolve: t1 must be >= t0");
  const std::size_t n_steps = static_cast<std::size_t>(std::llround((t1 - t0) / step));

  Trajectory traj;
  traj.dt = step;
  traj.params_used.n_agents = x0.n_agents();
  traj.params_used.dt = step;
  traj.params_used.n_steps = n_steps;
  traj.states.reserve(n_steps + 1);
  SwarmState x = x0;
  x.time = t0;
  traj.states.push_back(x);
  for (std::size_t k = 0; k < n_steps; ++k) {
    const SwarmState& cur = traj.states.back();
    const StateDerivative d = rhs(cur);
    SwarmState next;
    next.time = cur.time + step;
    next.positions.resize(cur.n_agents());
    next.velocities.resize(cur.n_agents());
    for (std::size_t i = 0; i < cur.n_agents(); ++i) {
      next.positions[i] = cur.positions[i] + step * d.d_positions[i];
      next.velocities[i] = cur.velocities[i] + step * d.d_velocities[i];
    }
    if (!next.all_finite()) {
      std::ostringstream os;
      os << "odesolve produced a non-finite state at step " << k + 1;
      throw BlowupError(os.str(), k + 1);
    }
    traj.states.push_back(std::move(next));
  }
  return traj;
}

namespace {

// tape replica of the velocity network at one state; used for the adjoint's
// vector-Jacobian products
struct VelTape {
  Tape tape;
  Tape::NodeId r = 0, v = 0, out = 0;
  std::vector<Tape::NodeId> theta;
};

Tape::NodeId tape_net3(Tape& t, Tape::NodeId x, const std::vector<Tape::NodeId>& p,
                       std::size_t base) {
  const Tape::NodeId h1 = t.tanh(t.add(t.matmul(x, p[base + 0]), p[base + 1]));
  const Tape::NodeId h2 = t.tanh(t.add(t.matmul(h1, p[base + 2]), p[base + 3]));
  return t.add(t.matmul(h2, p[base + 4]), p[base + 5]);
}

VelTape build_vel_tape(const ParamLayout& layout,
                       std::span<const double> params, const SwarmState& state) {
  const std::size_t n = state.n_agents();
  auto vt = VelTape{};
  Tape& t = vt.tape;

  Array r({n, 2}), v({n, 2});
  for (std::size_t i = 0; i < n; ++i) {
    r.at(i, 0) = state.positions[i].x;
    r.at(i, 1) = state.positions[i].y;
    v.at(i, 0) = state.velocities[i].x;
    v.at(i, 1) = state.velocities[i].y;
  }
  vt.r = t.param(std::move(r));
  vt.v = t.param(std::move(v));
  for (const ParamEntry& e : layout.entries) {
    std::vector<double> vals(params.begin() + static_cast<long>(e.offset),
                             params.begin() + static_cast<long>(e.offset + shape_size(e.shape)));
    vt.theta.push_back(t.param(Array(e.shape, std::move(vals))));
  }

  // intrinsic features
  const Tape::NodeId vx = t.slice(vt.v, 1, 0, 1);
  const Tape::NodeId vy = t.slice(vt.v, 1, 1, 1);
  const Tape::NodeId f3 = t.add(t.cubic(vx), t.mul(t.mul(vy, vy), vx));
  const Tape::NodeId f4 = t.add(t.cubic(vy), t.mul(t.mul(vx, vx), vy));
  const Tape::NodeId feats = t.concat({vx, vy, f3, f4}, 1);
  const Tape::NodeId intr_out = tape_net3(t, feats, vt.theta, 0);

  Tape::NodeId mean_io;
  if (n > 1) {
    const std::size_t pairs = n * (n - 1);
    Array sdiff({pairs, n});
    std::size_t p = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        sdiff.at(p, i) = 1.0;
        sdiff.at(p, j) = -1.0;
        ++p;
      }
    const RowMat avg = pair_average_matrix(n);
    Array avg_arr({n, pairs});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t q = 0; q < pairs; ++q)
        avg_arr.at(i, q) = avg(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q));
    const Tape::NodeId d = t.matmul(t.constant(std::move(sdiff)), vt.r);
    const Tape::NodeId io = tape_net3(t, d, vt.theta, 6);
    mean_io = t.matmul(t.constant(std::move(avg_arr)), io);
  } else {
    mean_io = t.constant(Array::zeros({1, 2}));
  }
  const Tape::NodeId agg_out = tape_net3(t, mean_io, vt.theta, 12);
  vt.out = t.add(intr_out, agg_out);
  return vt;
}

void check_loss_grads(const Trajectory& traj, const std::vector<std::vector<double>>& grads) {
  if (grads.size() != traj.size())
    throw std::invalid_argument("adjoint_backward: one loss gradient per forward state required");
  const std::size_t width = 4 * traj.n_agents();
  for (std::size_t k = 1; k < grads.size(); ++k)
    if (grads[k].size() != width)
      throw std::invalid_argument("adjoint_backward: loss gradient width mismatch");
}

}  // namespace

std::vector<double> adjoint_backward(const NodeArchitecture& arch, std::span<const double> params,
                                     const Trajectory& forward_traj,
                                     const std::vector<std::vector<double>>& loss_grad_at_states) {
  const ParamLayout layout = node_param_layout(arch);
  if (params.size() != layout.total)
    throw ShapeError("adjoint_backward: parameter vector does not match the architecture");
  if (forward_traj.size() < 2)
    throw std::invalid_argument("adjoint_backward: need at least one forward step");
  check_loss_grads(forward_traj, loss_grad_at_states);

  const std::size_t n = forward_traj.n_agents();
  const std::size_t last = forward_traj.size() - 1;
  const double h = forward_traj.dt;

  // adjoint split into position and velocity blocks, feature ordering
  std::vector<double> a_r(2 * n), a_v(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    a_r[2 * i] = loss_grad_at_states[last][4 * i];
    a_r[2 * i + 1] = loss_grad_at_states[last][4 * i + 1];
    a_v[2 * i] = loss_grad_at_states[last][4 * i + 2];
    a_v[2 * i + 1] = loss_grad_at_states[last][4 * i + 3];
  }

  std::vector<double> theta_grad(layout.total, 0.0);
  for (std::size_t k = last; k-- > 0;) {
    VelTape vt = build_vel_tape(layout, params, forward_traj.states[k]);
    const Tape::NodeId cot = vt.tape.constant(Array({n, 2}, a_v));
    const Tape::NodeId s = vt.tape.sum(vt.tape.mul(vt.out, cot));
    vt.tape.backward(s);

    const Array& g_r = vt.tape.grad(vt.r);
    const Array& g_v = vt.tape.grad(vt.v);
    for (std::size_t e = 0; e < layout.entries.size(); ++e) {
      const Array& g = vt.tape.grad(vt.theta[e]);
      if (g.size() != shape_size(layout.entries[e].shape)) continue;  // untouched net
      const std::size_t off = layout.entries[e].offset;
      for (std::size_t i = 0; i < g.size(); ++i) theta_grad[off + i] += h * g.data[i];
    }

    // transport across x_{k+1} = x_k + h (v_k, G(x_k)); d_pos depends on v only
    std::vector<double> new_a_r(2 * n), new_a_v(2 * n);
    const bool has_gr = g_r.size() == 2 * n;
    const bool has_gv = g_v.size() == 2 * n;
    for (std::size_t i = 0; i < 2 * n; ++i) {
      new_a_r[i] = a_r[i] + (has_gr ? h * g_r.data[i] : 0.0);
      new_a_v[i] = a_v[i] + h * a_r[i] + (has_gv ? h * g_v.data[i] : 0.0);
    }
    a_r = std::move(new_a_r);
    a_v = std::move(new_a_v);

    if (k >= 1) {
      for (std::size_t i = 0; i < n; ++i) {
        a_r[2 * i] += loss_grad_at_states[k][4 * i];
        a_r[2 * i + 1] += loss_grad_at_states[k][4 * i + 1];
        a_v[2 * i] += loss_grad_at_states[k][4 * i + 2];
        a_v[2 * i + 1] += loss_grad_at_states[k][4 * i + 3];
      }
    }
  }
  return theta_grad;
}

std::vector<Segment> make_segments(const Trajectory& traj, std::size_t segment_len,
                                   std::size_t max_segments) {
  if (segment_len == 0) throw std::invalid_argument("segment_len must be positive");
  if (traj.size() < segment_len + 1)
    throw std::invalid_argument("trajectory too short for one segment");
  std::vector<Segment> out;
  for (std::size_t start = 0; start + segment_len < traj.size(); start += segment_len) {
    Segment s;
    s.states.assign(traj.states.begin() + static_cast<long>(start),
                    traj.states.begin() + static_cast<long>(start + segment_len + 1));
    out.push_back(std::move(s));
    if (max_segments != 0 && out.size() == max_segments) break;
  }
  return out;
}

NodeTrainResult train_node(const std::vector<Segment>& segments, const NodeArchitecture& arch,
                           const NodeTrainConfig& config) {
  if (segments.empty()) throw std::invalid_argument("train_node: no segments");
  if (!(config.solver_step > 0.0)) throw std::invalid_argument("train_node: solver_step must be > 0");
  const std::size_t n = segments.front().states.front().n_agents();
  for (const Segment& seg : segments) {
    if (seg.states.size() < 2) throw std::invalid_argument("train_node: segment needs >= 2 states");
    for (std::size_t k = 1; k < seg.states.size(); ++k) {
      if (seg.states[k].n_agents() != n)
        throw std::invalid_argument("train_node: segments disagree on agent count");
      const double dt = seg.states[k].time - seg.states[k - 1].time;
      if (std::abs(dt - config.solver_step) > 1e-9)
        throw std::invalid_argument(
            "train_node: segment sampling interval is incompatible with solver_step");
    }
  }

  const ParamLayout layout = node_param_layout(arch);
  NodeTrainResult result;
  result.params = init_node_params(arch, config.seed);
  result.learning_curve.reserve(config.epochs);
  OptimizerState opt = OptimizerState::adam(config.learning_rate);

  const double seg_count = static_cast<double>(segments.size());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double total_loss = 0.0;
    std::vector<double> grads(layout.total, 0.0);
    for (const Segment& seg : segments) {
      const std::size_t steps = seg.states.size() - 1;
      const double t0 = seg.states.front().time;
      Trajectory fwd;
      try {
        fwd = odesolve(
            [&](const SwarmState& s) { return node_rhs(s, arch, result.params); },
            seg.states.front(), t0, t0 + static_cast<double>(steps) * config.solver_step,
            config.solver_step);
      } catch (const BlowupError& e) {
        std::ostringstream os;
        os << "node training diverged at epoch " << epoch << ": " << e.what();
        throw TrainingDivergedError(os.str(), epoch);
      }

      const double denom = static_cast<double>(steps) * static_cast<double>(4 * n) * seg_count;
      std::vector<std::vector<double>> loss_grads(fwd.size());
      double seg_loss = 0.0;
      for (std::size_t k = 1; k < fwd.size(); ++k) {
        const std::vector<double> pred = state_features(fwd.states[k]);
        const std::vector<double> obs = state_features(seg.states[k]);
        loss_grads[k].resize(pred.size());
        for (std::size_t i = 0; i < pred.size(); ++i) {
          const double d = pred[i] - obs[i];
          seg_loss += d * d;
          loss_grads[k][i] = 2.0 * d / denom;
        }
      }
      total_loss += seg_loss / denom;

      const std::vector<double> g = adjoint_backward(arch, result.params, fwd, loss_grads);
      for (std::size_t i = 0; i < grads.size(); ++i) grads[i] += g[i];
    }
    if (!std::isfinite(total_loss)) {
      std::ostringstream os;
      os << "node training diverged at epoch " << epoch << " (non-finite loss)";
      throw TrainingDivergedError(os.str(), epoch);
    }
    result.learning_curve.push_back(total_loss);
    opt.step(result.params, grads);
  }
  return result;
}

Trajectory node_rollout(const NodeArchitecture& arch, std::span<const double> params,
                        const SwarmState& ic, std::size_t n_steps, double step) {
  ic.validate();
  return odesolve([&](const SwarmState& s) { return node_rhs(s, arch, params); }, ic, ic.time,
                  ic.time + static_cast<double>(n_steps) * step, step);
}

void save_node_model(const std::string& path, const NodeArchitecture& arch,
                     std::span<const double> params) {
  std::vector<std::pair<std::string, std::string>> header;
  header.emplace_back("model", "node");
  header.emplace_back("hidden", std::to_string(arch.hidden));
  save_params(path, header, params);
}

std::pair<NodeArchitecture, std::vector<double>> load_node_model(const std::string& path) {
  const ParamFile pf = load_params(path);
  const auto it = pf.header.find("hidden");
  if (it == pf.header.end() || pf.header.count("model") == 0)
    throw std::runtime_error("node model file " + path + " is missing header keys");
  NodeArchitecture arch;
  arch.hidden = std::stoul(it->second);
  if (pf.values.size() != node_param_layout(arch).total)
    throw std::runtime_error("node model file " + path + " parameter count mismatch");
  return {arch, pf.values};
}

}  // namespace swarmsid
