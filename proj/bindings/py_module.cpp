#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "swarmsid/experiment.hpp"
#include "swarmsid/metrics.hpp"
#include "swarmsid/models.hpp"
#include "swarmsid/node.hpp"
#include "swarmsid/ols.hpp"
#include "swarmsid/regime.hpp"

namespace py = pybind11;
using namespace swarmsid;

namespace {

std::vector<std::pair<double, double>> vecs_to_pairs(const std::vector<Vec2>& v) {
  std::vector<std::pair<double, double>> out;
  out.reserve(v.size());
  for (const Vec2& p : v) out.emplace_back(p.x, p.y);
  return out;
}

std::vector<Vec2> pairs_to_vecs(const std::vector<std::pair<double, double>>& v) {
  std::vector<Vec2> out;
  out.reserve(v.size());
  for (const auto& [x, y] : v) out.push_back({x, y});
  return out;
}

Array window_from_tail(const Trajectory& traj, std::size_t window_len) {
  if (traj.size() < window_len)
    throw std::invalid_argument("trajectory shorter than the requested window");
  const std::size_t width = 4 * traj.n_agents();
  Array w({window_len, width});
  for (std::size_t k = 0; k < window_len; ++k) {
    const auto f = state_features(traj.states[traj.size() - window_len + k]);
    std::copy(f.begin(), f.end(), w.data.begin() + static_cast<long>(k * width));
  }
  return w;
}

struct PyForecaster {
  ForecasterSpec spec;
  std::vector<double> params;
};

struct PyNodeModel {
  NodeArchitecture arch;
  std::vector<double> params;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "swarm simulation and system-identification toolkit";

  py::class_<SwarmParams>(m, "SwarmParams")
      .def(py::init([](std::size_t n_agents, double coupling, double noise_std, double dt,
                       std::size_t n_steps, std::uint64_t seed) {
             SwarmParams p;
             p.n_agents = n_agents;
             p.coupling = coupling;
             p.noise_std = noise_std;
             p.dt = dt;
             p.n_steps = n_steps;
             p.seed = seed;
             p.validate();
             return p;
           }),
           py::arg("n_agents") = 32, py::arg("coupling") = 1.0, py::arg("noise_std") = 0.0,
           py::arg("dt") = 0.05, py::arg("n_steps") = 1000, py::arg("seed") = 0)
      .def_readwrite("n_agents", &SwarmParams::n_agents)
      .def_readwrite("coupling", &SwarmParams::coupling)
      .def_readwrite("noise_std", &SwarmParams::noise_std)
      .def_readwrite("dt", &SwarmParams::dt)
      .def_readwrite("n_steps", &SwarmParams::n_steps)
      .def_readwrite("seed", &SwarmParams::seed);

  py::class_<SwarmState>(m, "SwarmState")
      .def(py::init([](const std::vector<std::pair<double, double>>& positions,
                       const std::vector<std::pair<double, double>>& velocities, double time) {
             SwarmState s;
             s.positions = pairs_to_vecs(positions);
             s.velocities = pairs_to_vecs(velocities);
             s.time = time;
             s.validate();
             return s;
           }),
           py::arg("positions"), py::arg("velocities"), py::arg("time") = 0.0)
      .def_property_readonly("positions",
                             [](const SwarmState& s) { return vecs_to_pairs(s.positions); })
      .def_property_readonly("velocities",
                             [](const SwarmState& s) { return vecs_to_pairs(s.velocities); })
      .def_readonly("time", &SwarmState::time)
      .def("n_agents", &SwarmState::n_agents);

  py::class_<Trajectory>(m, "Trajectory")
      .def("__len__", &Trajectory::size)
      .def("state", [](const Trajectory& t, std::size_t k) { return t.states.at(k); })
      .def("n_agents", &Trajectory::n_agents)
      .def_readonly("dt", &Trajectory::dt);

  py::class_<RegimeDiagnostics>(m, "RegimeDiagnostics")
      .def_readonly("polarization", &RegimeDiagnostics::polarization)
      .def_readonly("ring_radius_mean", &RegimeDiagnostics::ring_radius_mean)
      .def_readonly("ring_radius_cv", &RegimeDiagnostics::ring_radius_cv)
      .def_readonly("cluster_spread", &RegimeDiagnostics::cluster_spread)
      .def_readonly("orbit_radius", &RegimeDiagnostics::orbit_radius);

  py::class_<RegimeLabel>(m, "RegimeLabel")
      .def_property_readonly("regime",
                             [](const RegimeLabel& l) { return std::string(to_string(l.regime)); })
      .def_readonly("diagnostics", &RegimeLabel::diagnostics);

  py::class_<SteadyDescriptors>(m, "SteadyDescriptors")
      .def_readonly("mean_speed", &SteadyDescriptors::mean_speed)
      .def_readonly("ring_radius_mean", &SteadyDescriptors::ring_radius_mean)
      .def_readonly("ring_radius_cv", &SteadyDescriptors::ring_radius_cv)
      .def_readonly("polarization", &SteadyDescriptors::polarization);

  m.def(
      "sample_initial_conditions",
      [](std::size_t n_agents, std::uint64_t seed, double pos_box, double vel_box) {
        InitRanges r;
        r.pos_min = {-pos_box, -pos_box};
        r.pos_max = {pos_box, pos_box};
        r.vel_min = {-vel_box, -vel_box};
        r.vel_max = {vel_box, vel_box};
        return sample_initial_conditions(n_agents, r, seed);
      },
      py::arg("n_agents"), py::arg("seed") = 0, py::arg("pos_box") = 1.0, py::arg("vel_box") = 1.0);
  m.def("simulate", &simulate, py::arg("params"), py::arg("ic"));
  m.def(
      "classify_regime",
      [](const Trajectory& t, double window_frac) { return classify_regime(t, window_frac); },
      py::arg("trajectory"), py::arg("window_frac") = 0.2);

  m.def("mean_field",
        [](const SwarmState& s) { return std::pair<double, double>{mean_field(s).x, mean_field(s).y}; });
  m.def("mfe", &mfe, py::arg("truth"), py::arg("predicted"));
  m.def(
      "mfe_series",
      [](const Trajectory& a, const Trajectory& b) { return mfe_series(a, b).values; },
      py::arg("truth"), py::arg("predicted"));
  m.def("steady_descriptors", &steady_descriptors, py::arg("trajectory"), py::arg("tail_frac") = 0.2);

  m.def("write_trajectory_csv", &write_trajectory_csv, py::arg("trajectory"), py::arg("path"));
  m.def("read_trajectory_csv", &read_trajectory_csv, py::arg("path"));
  m.def(
      "fold_windows",
      [](const Trajectory& t, std::size_t window_len) {
        std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
        for (const WindowedSample& s : fold_windows(t, window_len))
          out.emplace_back(s.input.data, s.target.data);
        return out;
      },
      py::arg("trajectory"), py::arg("window_len") = 5,
      "Flattened (input, target) pairs; inputs are window_len x 4N row-major.");

  py::class_<OlsModel>(m, "OlsModel")
      .def_readonly("in_samples", &OlsModel::in_samples)
      .def_readonly("horizon", &OlsModel::horizon)
      .def_readonly("rank_deficient", &OlsModel::rank_deficient);
  m.def(
      "fit_ols",
      [](const Trajectory& traj, std::size_t m_window, double ridge) {
        return fit_ols(fold_windows(traj, m_window), ridge);
      },
      py::arg("trajectory"), py::arg("m") = 10, py::arg("ridge") = 0.0);
  m.def(
      "ols_rollout",
      [](const OlsModel& model, const Trajectory& history, std::size_t n_steps) {
        const Array w = window_from_tail(history, model.in_samples);
        const double t0 = history.states.back().time + history.dt;
        return ols_rollout(model, w, n_steps, history.dt, t0);
      },
      py::arg("model"), py::arg("history"), py::arg("n_steps"),
      "Roll forward from the last m states of `history`.");

  py::class_<PyForecaster>(m, "Forecaster")
      .def_property_readonly("kind",
                             [](const PyForecaster& f) { return std::string(to_string(f.spec.kind)); })
      .def_property_readonly("param_count", [](const PyForecaster& f) { return f.params.size(); });
  m.def(
      "train_forecaster",
      [](const std::string& kind, const Trajectory& traj, std::size_t window_len,
         std::size_t hidden, std::size_t epochs, double learning_rate, std::uint64_t seed) {
        ForecasterSpec spec;
        spec.kind = model_kind_from_string(kind);
        spec.window_len = window_len;
        spec.io_width = 4 * traj.n_agents();
        spec.hidden = hidden;
        TrainConfig tc = default_train_config(spec.kind);
        if (epochs) tc.epochs = epochs;
        if (learning_rate > 0.0) tc.learning_rate = learning_rate;
        tc.seed = seed;
        TrainResult r = train_forecaster(spec, fold_windows(traj, window_len), tc);
        return std::make_pair(PyForecaster{spec, std::move(r.params)}, r.loss_history);
      },
      py::arg("kind"), py::arg("trajectory"), py::arg("window_len") = 5, py::arg("hidden") = 256,
      py::arg("epochs") = 0, py::arg("learning_rate") = 0.0, py::arg("seed") = 0);
  m.def(
      "forecaster_rollout",
      [](const PyForecaster& f, const Trajectory& history, std::size_t n_steps) {
        const Array w = window_from_tail(history, f.spec.window_len);
        const double t0 = history.states.back().time + history.dt;
        return forecaster_rollout(f.spec, f.params, w, n_steps, history.dt, t0);
      },
      py::arg("model"), py::arg("history"), py::arg("n_steps"));

  py::class_<PyNodeModel>(m, "NodeModel")
      .def_property_readonly("param_count", [](const PyNodeModel& n) { return n.params.size(); });
  m.def(
      "train_node",
      [](const Trajectory& traj, std::size_t segment_len, std::size_t max_segments,
         std::size_t hidden, std::size_t epochs, double learning_rate, std::uint64_t seed) {
        NodeArchitecture arch;
        arch.hidden = hidden;
        NodeTrainConfig cfg;
        cfg.solver_step = traj.dt;
        cfg.epochs = epochs;
        cfg.learning_rate = learning_rate;
        cfg.seed = seed;
        NodeTrainResult r = train_node(make_segments(traj, segment_len, max_segments), arch, cfg);
        return std::make_pair(PyNodeModel{arch, std::move(r.params)}, r.learning_curve);
      },
      py::arg("trajectory"), py::arg("segment_len") = 50, py::arg("max_segments") = 3,
      py::arg("hidden") = 64, py::arg("epochs") = 100, py::arg("learning_rate") = 0.01,
      py::arg("seed") = 0);
  m.def(
      "node_rollout",
      [](const PyNodeModel& model, const SwarmState& ic, std::size_t n_steps, double step) {
        return node_rollout(model.arch, model.params, ic, n_steps, step);
      },
      py::arg("model"), py::arg("ic"), py::arg("n_steps"), py::arg("step") = 0.05);
}
