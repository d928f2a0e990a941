#include "swarmsid/experiment.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "swarmsid/metrics.hpp"
#include "swarmsid/models.hpp"
#include "swarmsid/ols.hpp"
#include "swarmsid/serialize.hpp"

namespace swarmsid {

namespace fs = std::filesystem;

namespace {

Phase phase_from_string(const std::string& s) {
  if (s == "steady") return Phase::Steady;
  if (s == "transient") return Phase::Transient;
  throw std::invalid_argument("phase must be 'steady' or 'transient', got '" + s + "'");
}

IcMatch ic_from_string(const std::string& s) {
  if (s == "same") return IcMatch::SameAsTest;
  if (s == "different") return IcMatch::Different;
  throw std::invalid_argument("ic_match must be 'same' or 'different', got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void check_model_name(const std::string& m) {
  if (m != "ols" && m != "mlp" && m != "rnn" && m != "cnn" && m != "node" && m != "truth")
    throw std::invalid_argument("model must be one of ols|mlp|rnn|cnn|node|truth, got '" + m + "'");
}

}  // namespace

InitRanges ExperimentConfig::init_ranges() const {
  InitRanges r;
  r.pos_min = {-pos_box, -pos_box};
  r.pos_max = {pos_box, pos_box};
  r.vel_min = {-vel_box, -vel_box};
  r.vel_max = {vel_box, vel_box};
  return r;
}

ExperimentConfig ExperimentConfig::from_kv(const KvConfig& kv) {
  ExperimentConfig c;
  c.sim.n_agents = kv.get_size("n_agents", 32);
  c.sim.coupling = kv.get_double("coupling", 1.0);
  c.sim.noise_std = kv.get_double("noise_std", 1e-3);
  c.sim.dt = kv.get_double("dt", 0.05);
  c.sim.n_steps = kv.get_size("n_steps", 3000);
  c.sim.seed = kv.get_u64("seed", 1);
  const std::string scaling = kv.get_str("noise_scaling", "sqrt_dt");
  if (scaling == "sqrt_dt")
    c.sim.noise_scaling = NoiseScaling::SqrtDt;
  else if (scaling == "dt")
    c.sim.noise_scaling = NoiseScaling::Dt;
  else
    throw std::invalid_argument("noise_scaling must be 'sqrt_dt' or 'dt'");
  c.sim.validate();

  c.test_seed = kv.get_u64("test_seed", c.sim.seed + 1);
  c.methodology.phase = phase_from_string(kv.get_str("phase", "steady"));
  c.methodology.ic_match = ic_from_string(kv.get_str("ic_match", "same"));

  c.split = SplitSpec::for_phase(c.methodology.phase);
  c.split.window_len = kv.get_size("window_len", 5);
  c.split.train_len = kv.get_size("train_len", c.split.train_len);
  c.split.test_len = kv.get_size("test_len", c.split.test_len);
  c.split.validate();

  c.model = kv.get_str("model", "rnn");
  check_model_name(c.model);
  c.epochs = kv.get_size("epochs", 0);
  c.learning_rate = kv.get_double("learning_rate", 0.0);
  c.batch_size = kv.get_size("batch_size", 0);
  c.hidden = kv.get_size("hidden", 256);

  c.ols_m = kv.get_size("ols_m", 10);
  c.ols_n = kv.get_size("ols_n", 1);
  c.ols_ridge = kv.get_double("ols_ridge", 0.0);
  c.ols_per_agent = kv.get_bool("ols_per_agent", false);

  c.node_arch.hidden = kv.get_size("node_hidden", 64);
  c.node_train.solver_step = kv.get_double("node_solver_step", c.sim.dt);
  c.node_train.learning_rate = kv.get_double("node_lr", 0.01);
  c.node_train.epochs = kv.get_size("node_epochs", 400);
  c.node_train.seed = c.sim.seed;
  c.node_segments = kv.get_size("node_segments", 3);
  c.node_segment_len = kv.get_size("node_segment_len", 50);

  c.pos_box = kv.get_double("pos_box", 1.0);
  c.vel_box = kv.get_double("vel_box", 1.0);
  c.tail_frac = kv.get_double("tail_frac", 0.2);
  c.regime_window_frac = kv.get_double("regime_window_frac", 0.2);
  c.thresholds.flock_polarization_min = kv.get_double("regime_flock_pmin", 0.9);
  c.thresholds.ring_cv_max = kv.get_double("regime_ring_cv_max", 0.2);
  c.thresholds.mill_spread_to_radius_min = kv.get_double("regime_mill_spread_min", 0.8);
  c.thresholds.rot_spread_to_orbit_max = kv.get_double("regime_rot_spread_max", 0.5);
  c.thresholds.orbit_cv_max = kv.get_double("regime_orbit_cv_max", 0.2);

  c.out = kv.get_str("out", "out");
  if (kv.has("compare_models")) c.compare_models = split_list(kv.get_str("compare_models", ""));
  if (kv.has("compare_phases")) c.compare_phases = split_list(kv.get_str("compare_phases", ""));
  if (kv.has("compare_ics")) c.compare_ics = split_list(kv.get_str("compare_ics", ""));
  for (const std::string& m : c.compare_models) check_model_name(m);
  return c;
}

namespace {

std::string model_file_name(const std::string& model) {
  return model == "ols" ? "model_ols.csv" : "model_" + model + ".txt";
}

void write_loss_csv(const std::string& path, const std::vector<double>& losses) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i)
    out << i + 1 << "," << format_double(losses[i]) << "\n";
}

Array ols_seed_window(const MethodologyData& data, const ExperimentConfig& cfg) {
  const std::size_t width = 4 * cfg.sim.n_agents;
  Array window({cfg.ols_m, width});
  if (cfg.split.train_len < cfg.ols_m)
    throw std::invalid_argument("train_len is shorter than the OLS window");
  for (std::size_t w = 0; w < cfg.ols_m; ++w) {
    const std::size_t idx = cfg.split.train_len - cfg.ols_m + w;
    const std::vector<double> f = state_features(data.test_run.states[idx]);
    std::copy(f.begin(), f.end(), window.data.begin() + static_cast<long>(w * width));
  }
  return window;
}

MethodologyData build_data(const ExperimentConfig& cfg) {
  return build_methodology(cfg.methodology, cfg.sim, cfg.split, cfg.sim.seed, cfg.test_seed,
                           cfg.init_ranges());
}

Trajectory training_prefix(const MethodologyData& data, const ExperimentConfig& cfg) {
  Trajectory prefix;
  prefix.dt = data.train_run.dt;
  prefix.params_used = data.train_run.params_used;
  prefix.states.assign(data.train_run.states.begin(),
                       data.train_run.states.begin() + static_cast<long>(cfg.split.train_len));
  return prefix;
}

ForecasterSpec spec_for(const ExperimentConfig& cfg) {
  ForecasterSpec spec;
  spec.kind = model_kind_from_string(cfg.model);
  spec.window_len = cfg.split.window_len;
  spec.io_width = 4 * cfg.sim.n_agents;
  spec.hidden = cfg.hidden;
  return spec;
}

TrainConfig train_config_for(const ExperimentConfig& cfg, ModelKind kind) {
  TrainConfig tc = default_train_config(kind);
  if (cfg.epochs != 0) tc.epochs = cfg.epochs;
  if (cfg.learning_rate != 0.0) tc.learning_rate = cfg.learning_rate;
  tc.batch_size = cfg.batch_size;
  tc.seed = cfg.sim.seed;
  return tc;
}

/// Predictions aligned with the test trajectory, one state per test step.
Trajectory predict_test(const ExperimentConfig& cfg, const MethodologyData& data) {
  const fs::path dir(cfg.out);
  const double t_start = data.test_traj.states.front().time;
  if (cfg.model == "truth") return data.test_traj;
  if (cfg.model == "ols") {
    const OlsModel model = load_ols_csv((dir / model_file_name(cfg.model)).string());
    return ols_rollout(model, ols_seed_window(data, cfg), cfg.split.test_len, cfg.sim.dt, t_start);
  }
  if (cfg.model == "node") {
    const auto [arch, params] = load_node_model((dir / model_file_name(cfg.model)).string());
    const SwarmState& ic = data.test_run.states[cfg.split.train_len - 1];
    Trajectory roll = node_rollout(arch, params, ic, cfg.split.test_len, cfg.sim.dt);
    roll.states.erase(roll.states.begin());  // drop the given pre-test state
    return roll;
  }
  const auto [spec, params] = load_forecaster((dir / model_file_name(cfg.model)).string());
  return forecaster_rollout(spec, params, data.seed_window, cfg.split.test_len, cfg.sim.dt,
                            t_start);
}

}  // namespace

void run_simulate(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  const SwarmState ic =
      sample_initial_conditions(cfg.sim.n_agents, cfg.init_ranges(), cfg.sim.seed ^ 0x9e3779b97f4a7c15ull);
  const Trajectory traj = simulate(cfg.sim, ic);
  const RegimeLabel label = classify_regime(traj, cfg.regime_window_frac, cfg.thresholds);

  const fs::path dir(cfg.out);
  write_trajectory_csv(traj, (dir / "trajectory.csv").string());
  std::vector<std::pair<std::string, std::string>> extra;
  extra.emplace_back("regime", to_string(label.regime));
  extra.emplace_back("polarization", format_double(label.diagnostics.polarization));
  extra.emplace_back("ring_radius_mean", format_double(label.diagnostics.ring_radius_mean));
  extra.emplace_back("ring_radius_cv", format_double(label.diagnostics.ring_radius_cv));
  extra.emplace_back("cluster_spread", format_double(label.diagnostics.cluster_spread));
  write_trajectory_metadata(traj, (dir / "trajectory.meta").string(), extra);
  std::cout << "simulate: " << traj.size() << " states, regime " << to_string(label.regime)
            << ", written to " << cfg.out << "\n";
}

void run_make_dataset(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  const MethodologyData data = build_data(cfg);
  const fs::path dir(cfg.out);
  write_trajectory_csv(training_prefix(data, cfg), (dir / "train.csv").string());
  write_trajectory_csv(data.test_traj, (dir / "test.csv").string());

  Trajectory seed;
  seed.dt = cfg.sim.dt;
  seed.params_used = data.test_run.params_used;
  for (std::size_t w = 0; w < cfg.split.window_len; ++w)
    seed.states.push_back(data.test_run.states[cfg.split.train_len - cfg.split.window_len + w]);
  write_trajectory_csv(seed, (dir / "seed_window.csv").string());

  std::vector<std::pair<std::string, std::string>> extra;
  extra.emplace_back("phase", to_string(cfg.methodology.phase));
  extra.emplace_back("ic_match", to_string(cfg.methodology.ic_match));
  extra.emplace_back("train_len", std::to_string(cfg.split.train_len));
  extra.emplace_back("test_len", std::to_string(cfg.split.test_len));
  extra.emplace_back("window_len", std::to_string(cfg.split.window_len));
  extra.emplace_back("test_seed", std::to_string(cfg.test_seed));
  write_trajectory_metadata(data.train_run, (dir / "dataset.meta").string(), extra);
  std::cout << "make-dataset: " << data.train_samples.size() << " training samples, test length "
            << data.test_traj.size() << ", written to " << cfg.out << "\n";
}

void run_train(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  const MethodologyData data = build_data(cfg);
  const fs::path dir(cfg.out);

  if (cfg.model == "truth") {
    std::cout << "train: model 'truth' has nothing to fit\n";
    return;
  }
  if (cfg.model == "ols") {
    const Trajectory prefix = training_prefix(data, cfg);
    const std::vector<WindowedSample> samples =
        fold_windows_horizon(prefix, cfg.ols_m, cfg.ols_n);
    const OlsModel model = fit_ols(samples, cfg.ols_ridge, cfg.ols_per_agent, cfg.ols_n);
    save_ols_csv(model, (dir / model_file_name(cfg.model)).string());
    // report the training residual as a one-entry loss history
    double resid = 0.0;
    std::size_t count = 0;
    for (const WindowedSample& s : samples) {
      const std::vector<double> pred = model.predict(s.input);
      for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - s.target.data[i];
        resid += d * d;
        ++count;
      }
    }
    write_loss_csv((dir / ("loss_" + cfg.model + ".csv")).string(),
                   {resid / static_cast<double>(count)});
    std::cout << "train: ols m=" << cfg.ols_m << " n=" << cfg.ols_n
              << (model.rank_deficient ? " (minimum-norm solution)" : "") << "\n";
    return;
  }
  if (cfg.model == "node") {
    const Trajectory prefix = training_prefix(data, cfg);
    const std::vector<Segment> segments =
        make_segments(prefix, cfg.node_segment_len, cfg.node_segments);
    NodeTrainConfig tc = cfg.node_train;
    tc.solver_step = cfg.sim.dt;
    const NodeTrainResult result = train_node(segments, cfg.node_arch, tc);
    save_node_model((dir / model_file_name(cfg.model)).string(), cfg.node_arch, result.params);
    write_loss_csv((dir / ("loss_" + cfg.model + ".csv")).string(), result.learning_curve);
    std::cout << "train: node " << segments.size() << " segments x " << cfg.node_segment_len
              << " steps, " << tc.epochs << " epochs, final loss "
              << result.learning_curve.back() << "\n";
    return;
  }

  const ForecasterSpec spec = spec_for(cfg);
  const TrainConfig tc = train_config_for(cfg, spec.kind);
  const TrainResult result = train_forecaster(spec, data.train_samples, tc);
  save_forecaster((dir / model_file_name(cfg.model)).string(), spec, result.params);
  write_loss_csv((dir / ("loss_" + cfg.model + ".csv")).string(), result.loss_history);
  std::cout << "train: " << cfg.model << " " << tc.epochs << " epochs, final loss "
            << result.loss_history.back() << "\n";
}

void run_evaluate(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  const MethodologyData data = build_data(cfg);
  const fs::path dir(cfg.out);

  const Trajectory predicted = predict_test(cfg, data);
  const MfeSeries series = mfe_series(data.test_traj, predicted);
  write_mfe_csv(series, (dir / ("mfe_" + cfg.model + ".csv")).string());

  const SteadyDescriptors d_true = steady_descriptors(data.test_traj, cfg.tail_frac);
  const SteadyDescriptors d_pred = steady_descriptors(predicted, cfg.tail_frac);

  RegimeLabel regime_true, regime_pred;
  bool classified = true;
  try {
    regime_true = classify_regime(data.test_traj, cfg.regime_window_frac, cfg.thresholds);
    regime_pred = classify_regime(predicted, cfg.regime_window_frac, cfg.thresholds);
  } catch (const std::invalid_argument&) {
    classified = false;  // test segment too short to classify
  }

  {
    std::ofstream out(dir / ("descriptors_" + cfg.model + ".txt"));
    out << "quantity,truth,predicted\n";
    out << "mean_speed," << format_double(d_true.mean_speed) << ","
        << format_double(d_pred.mean_speed) << "\n";
    out << "ring_radius_mean," << format_double(d_true.ring_radius_mean) << ","
        << format_double(d_pred.ring_radius_mean) << "\n";
    out << "ring_radius_cv," << format_double(d_true.ring_radius_cv) << ","
        << format_double(d_pred.ring_radius_cv) << "\n";
    out << "polarization," << format_double(d_true.polarization) << ","
        << format_double(d_pred.polarization) << "\n";
  }

  const double tail_mfe = series.tail_mean(cfg.tail_frac);
  const double ring = d_true.ring_radius_mean;
  const double tail_norm = ring > 0.0 ? tail_mfe / ring : tail_mfe;
  {
    std::ofstream out(dir / ("summary_" + cfg.model + ".csv"));
    out << "model,phase,ic_match,test_len,tail_mfe,ring_radius_true,tail_mfe_normalized,"
           "regime_true,regime_pred,regime_match\n";
    out << cfg.model << "," << to_string(cfg.methodology.phase) << ","
        << to_string(cfg.methodology.ic_match) << "," << cfg.split.test_len << ","
        << format_double(tail_mfe) << "," << format_double(ring) << ","
        << format_double(tail_norm) << ","
        << (classified ? to_string(regime_true.regime) : "unclassified") << ","
        << (classified ? to_string(regime_pred.regime) : "unclassified") << ","
        << (classified && regime_true.regime == regime_pred.regime ? 1 : 0) << "\n";
  }
  std::cout << "evaluate: " << cfg.model << " tail MFE " << tail_mfe << " (normalized "
            << tail_norm << ")\n";
}

namespace {

std::size_t compare_thread_cap() {
  if (const char* env = std::getenv("SWARM_SYSID_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace

void run_compare(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  struct Cell {
    std::string model, phase, ic;
    ExperimentConfig config;
  };
  std::vector<Cell> cells;
  for (const std::string& model : cfg.compare_models)
    for (const std::string& phase : cfg.compare_phases)
      for (const std::string& ic : cfg.compare_ics) {
        Cell cell;
        cell.model = model;
        cell.phase = phase;
        cell.ic = ic;
        cell.config = cfg;
        cell.config.model = model;
        cell.config.methodology.phase = phase_from_string(phase);
        cell.config.methodology.ic_match = ic_from_string(ic);
        // rebuild phase-dependent lengths unless the caller pinned them
        SplitSpec split = SplitSpec::for_phase(cell.config.methodology.phase);
        split.window_len = cfg.split.window_len;
        cell.config.split = split;
        cell.config.out =
            (fs::path(cfg.out) / ("cell_" + model + "_" + phase + "_" + ic)).string();
        cells.push_back(std::move(cell));
      }

  const std::size_t workers = std::min(compare_thread_cap(), cells.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(cells.size());
  auto worker = [&cells, &next, &errors]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        run_train(cells[i].config);
        run_evaluate(cells[i].config);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  std::ofstream out(fs::path(cfg.out) / "comparison.csv");
  out << "model,phase,ic_match,test_len,tail_mfe,ring_radius_true,tail_mfe_normalized,"
         "regime_true,regime_pred,regime_match\n";
  bool any_error = false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "cell " << cells[i].model << "/" << cells[i].phase << "/" << cells[i].ic
                << " failed: " << errors[i] << "\n";
      any_error = true;
      continue;
    }
    std::ifstream in(fs::path(cells[i].config.out) / ("summary_" + cells[i].model + ".csv"));
    std::string header, row;
    if (std::getline(in, header) && std::getline(in, row)) out << row << "\n";
  }
  if (any_error) throw std::runtime_error("one or more comparison cells failed");
  std::cout << "compare: " << cells.size() << " cells written to " << cfg.out << "/comparison.csv\n";
}

}  // namespace swarmsid
