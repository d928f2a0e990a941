#pragma once

// Reverse-mode gradient through the fully unrolled Euler solve, built as one
// big tape. Reimplements the vector-field graph from the architecture
// definition so it exercises a different differentiation path than the
// hand-rolled adjoint loop.

#include <span>
#include <vector>

#include "swarmsid/node.hpp"
#include "swarmsid/tape.hpp"

namespace oracles {

namespace detail {

inline swarmsid::Tape::NodeId net3(swarmsid::Tape& t, swarmsid::Tape::NodeId x,
                                   const std::vector<swarmsid::Tape::NodeId>& p, std::size_t base) {
  const auto h1 = t.tanh(t.add(t.matmul(x, p[base + 0]), p[base + 1]));
  const auto h2 = t.tanh(t.add(t.matmul(h1, p[base + 2]), p[base + 3]));
  return t.add(t.matmul(h2, p[base + 4]), p[base + 5]);
}

}  // namespace detail

/// Gradient of the segment MSE (states 1..L vs observed, mean over L*4N
/// elements) w.r.t. the flat parameter vector.
inline std::vector<double> unrolled_node_gradient(const swarmsid::NodeArchitecture& arch,
                                                  std::span<const double> params,
                                                  const std::vector<swarmsid::SwarmState>& observed,
                                                  double step) {
  using swarmsid::Array;
  using swarmsid::Tape;
  const swarmsid::ParamLayout layout = swarmsid::node_param_layout(arch);
  const std::size_t n = observed.front().n_agents();
  const std::size_t steps = observed.size() - 1;

  Tape t;
  std::vector<Tape::NodeId> p;
  for (const swarmsid::ParamEntry& e : layout.entries) {
    std::vector<double> vals(params.begin() + static_cast<long>(e.offset),
                             params.begin() + static_cast<long>(e.offset + swarmsid::shape_size(e.shape)));
    p.push_back(t.param(Array(e.shape, std::move(vals))));
  }

  Array r0({n, 2}), v0({n, 2});
  for (std::size_t i = 0; i < n; ++i) {
    r0.at(i, 0) = observed[0].positions[i].x;
    r0.at(i, 1) = observed[0].positions[i].y;
    v0.at(i, 0) = observed[0].velocities[i].x;
    v0.at(i, 1) = observed[0].velocities[i].y;
  }
  Tape::NodeId r = t.constant(std::move(r0));
  Tape::NodeId v = t.constant(std::move(v0));

  // constant pair-selection and averaging matrices
  Tape::NodeId sdiff = 0, avg = 0;
  if (n > 1) {
    const std::size_t pairs = n * (n - 1);
    Array sd({pairs, n}), av({n, pairs});
    std::size_t q = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        sd.at(q, i) = 1.0;
        sd.at(q, j) = -1.0;
        av.at(i, q) = 1.0 / static_cast<double>(n - 1);
        ++q;
      }
    sdiff = t.constant(std::move(sd));
    avg = t.constant(std::move(av));
  }

  Tape::NodeId total = 0;
  bool have_loss = false;
  for (std::size_t k = 0; k < steps; ++k) {
    // velocity field at (r, v)
    const auto vx = t.slice(v, 1, 0, 1);
    const auto vy = t.slice(v, 1, 1, 1);
    const auto f3 = t.add(t.cubic(vx), t.mul(t.mul(vy, vy), vx));
    const auto f4 = t.add(t.cubic(vy), t.mul(t.mul(vx, vx), vy));
    const auto intr = detail::net3(t, t.concat({vx, vy, f3, f4}, 1), p, 0);
    Tape::NodeId mean_io;
    if (n > 1)
      mean_io = t.matmul(avg, detail::net3(t, t.matmul(sdiff, r), p, 6));
    else
      mean_io = t.constant(Array::zeros({1, 2}));
    const auto g = t.add(intr, detail::net3(t, mean_io, p, 12));

    const Tape::NodeId r_next = t.add(r, t.scale(v, step));
    const Tape::NodeId v_next = t.add(v, t.scale(g, step));
    r = r_next;
    v = v_next;

    Array obs({n, 4});
    for (std::size_t i = 0; i < n; ++i) {
      obs.at(i, 0) = observed[k + 1].positions[i].x;
      obs.at(i, 1) = observed[k + 1].positions[i].y;
      obs.at(i, 2) = observed[k + 1].velocities[i].x;
      obs.at(i, 3) = observed[k + 1].velocities[i].y;
    }
    const Tape::NodeId pred = t.concat({r, v}, 1);
    const Tape::NodeId loss_k = t.mse(pred, t.constant(std::move(obs)));
    total = have_loss ? t.add(total, loss_k) : loss_k;
    have_loss = true;
  }
  const Tape::NodeId loss = t.scale(total, 1.0 / static_cast<double>(steps));
  t.backward(loss);

  std::vector<double> grad(layout.total, 0.0);
  for (std::size_t e = 0; e < layout.entries.size(); ++e) {
    const Array& g = t.grad(p[e]);
    const std::size_t sz = swarmsid::shape_size(layout.entries[e].shape);
    if (g.size() != sz) continue;
    for (std::size_t i = 0; i < sz; ++i) grad[layout.entries[e].offset + i] = g.data[i];
  }
  return grad;
}

/// Forward segment MSE via the plain evaluation path; used for finite
/// differences over the parameters.
inline double segment_loss(const swarmsid::NodeArchitecture& arch, std::span<const double> params,
                           const std::vector<swarmsid::SwarmState>& observed, double step) {
  const std::size_t steps = observed.size() - 1;
  const double t0 = observed.front().time;
  const swarmsid::Trajectory fwd = swarmsid::odesolve(
      [&](const swarmsid::SwarmState& s) { return swarmsid::node_rhs(s, arch, params); },
      observed.front(), t0, t0 + static_cast<double>(steps) * step, step);
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 1; k < fwd.size(); ++k) {
    for (std::size_t i = 0; i < fwd.n_agents(); ++i) {
      const swarmsid::Vec2 dp = fwd.states[k].positions[i] - observed[k].positions[i];
      const swarmsid::Vec2 dv = fwd.states[k].velocities[i] - observed[k].velocities[i];
      acc += dp.x * dp.x + dp.y * dp.y + dv.x * dv.x + dv.y * dv.y;
      count += 4;
    }
  }
  return acc / static_cast<double>(count);
}

}  // namespace oracles
