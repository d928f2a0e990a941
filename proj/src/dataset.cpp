#include "swarmsid/dataset.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "swarmsid/serialize.hpp"

namespace swarmsid {

namespace {
// decorrelates initial-condition draws from the integration noise stream
constexpr std::uint64_t kIcSeedSalt = 0x9e3779b97f4a7c15ull;
}  // namespace

const char* to_string(Phase p) { return p == Phase::Transient ? "transient" : "steady"; }
const char* to_string(IcMatch m) { return m == IcMatch::SameAsTest ? "same" : "different"; }

void SplitSpec::validate() const {
  if (train_len == 0 || test_len == 0 || window_len == 0)
    throw std::invalid_argument("split lengths must be positive");
  if (train_len < window_len + 1)
    throw std::invalid_argument("train_len must be at least window_len + 1");
}

SplitSpec SplitSpec::for_phase(Phase phase) {
  SplitSpec s;
  if (phase == Phase::Steady) {
    s.train_len = 2000;
    s.test_len = 1000;
  } else {
    s.train_len = 150;
    s.test_len = 100;
  }
  return s;
}

std::vector<double> state_features(const SwarmState& state) {
  std::vector<double> f;
  f.reserve(4 * state.n_agents());
  for (std::size_t i = 0; i < state.n_agents(); ++i) {
    f.push_back(state.positions[i].x);
    f.push_back(state.positions[i].y);
    f.push_back(state.velocities[i].x);
    f.push_back(state.velocities[i].y);
  }
  return f;
}

SwarmState state_from_features(std::span<const double> features, double time) {
  if (features.size() % 4 != 0)
    throw std::invalid_argument("feature vector length must be a multiple of 4");
  const std::size_t n = features.size() / 4;
  SwarmState s;
  s.time = time;
  s.positions.resize(n);
  s.velocities.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.positions[i] = {features[4 * i], features[4 * i + 1]};
    s.velocities[i] = {features[4 * i + 2], features[4 * i + 3]};
  }
  return s;
}

std::vector<WindowedSample> fold_windows_horizon(const Trajectory& traj, std::size_t window_len,
                                                 std::size_t horizon) {
  if (window_len == 0 || horizon == 0)
    throw std::invalid_argument("window_len and horizon must be positive");
  if (traj.size() < window_len + horizon)
    throw std::invalid_argument("trajectory too short to fold: need at least window_len + horizon samples");
  const std::size_t width = 4 * traj.n_agents();
  const std::size_t count = traj.size() - window_len - horizon + 1;
  std::vector<WindowedSample> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    WindowedSample s;
    s.input = Array({window_len, width});
    for (std::size_t w = 0; w < window_len; ++w) {
      const std::vector<double> f = state_features(traj.states[k + w]);
      std::copy(f.begin(), f.end(), s.input.data.begin() + static_cast<long>(w * width));
    }
    s.target = Array({width}, state_features(traj.states[k + window_len + horizon - 1]));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<WindowedSample> fold_windows(const Trajectory& traj, std::size_t window_len) {
  return fold_windows_horizon(traj, window_len, 1);
}

MethodologyData build_methodology(const Methodology& methodology, const SwarmParams& base_params,
                                  const SplitSpec& split, std::uint64_t train_seed,
                                  std::uint64_t test_seed, const InitRanges& ranges) {
  split.validate();
  const std::size_t total = split.train_len + split.test_len;

  SwarmParams params = base_params;
  params.n_steps = total - 1;

  auto run_for = [&](std::uint64_t seed) {
    SwarmParams p = params;
    p.seed = seed;
    const SwarmState ic =
        sample_initial_conditions(p.n_agents, ranges, seed ^ kIcSeedSalt);
    return simulate(p, ic);
  };

  MethodologyData data;
  data.train_run = run_for(train_seed);
  data.test_run = methodology.ic_match == IcMatch::SameAsTest ? data.train_run
                                                              : run_for(test_seed);

  Trajectory train_prefix;
  train_prefix.dt = data.train_run.dt;
  train_prefix.params_used = data.train_run.params_used;
  train_prefix.states.assign(data.train_run.states.begin(),
                             data.train_run.states.begin() + static_cast<long>(split.train_len));
  data.train_samples = fold_windows(train_prefix, split.window_len);

  data.test_traj.dt = data.test_run.dt;
  data.test_traj.params_used = data.test_run.params_used;
  data.test_traj.states.assign(data.test_run.states.begin() + static_cast<long>(split.train_len),
                               data.test_run.states.end());

  const std::size_t width = 4 * params.n_agents;
  data.seed_window = Array({split.window_len, width});
  for (std::size_t w = 0; w < split.window_len; ++w) {
    const std::size_t idx = split.train_len - split.window_len + w;
    const std::vector<double> f = state_features(data.test_run.states[idx]);
    std::copy(f.begin(), f.end(), data.seed_window.data.begin() + static_cast<long>(w * width));
  }
  return data;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::size_t n = traj.n_agents();
  out << "t";
  for (std::size_t i = 0; i < n; ++i)
    out << ",x" << i << ",y" << i << ",vx" << i << ",vy" << i;
  out << "\n";
  for (const SwarmState& s : traj.states) {
    out << format_double(s.time);
    for (std::size_t i = 0; i < n; ++i)
      out << "," << format_double(s.positions[i].x) << "," << format_double(s.positions[i].y)
          << "," << format_double(s.velocities[i].x) << "," << format_double(s.velocities[i].y);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line)) throw CsvParseError("empty file: " + path, 1, 0);
  const std::vector<std::string> header = split_csv_line(line);
  if (header.empty() || header[0] != "t" || (header.size() - 1) % 4 != 0)
    throw CsvParseError("malformed header in " + path + ": expected t,x0,y0,vx0,vy0,...", 1, 0);
  const std::size_t n = (header.size() - 1) / 4;
  for (std::size_t i = 0; i < n; ++i) {
    std::ostringstream want;
    want << "x" << i;
    if (header[1 + 4 * i] != want.str())
      throw CsvParseError("malformed header in " + path + ": column " + std::to_string(2 + 4 * i) +
                              " should be " + want.str(),
                          1, 2 + 4 * i);
  }

  Trajectory traj;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      std::ostringstream os;
      os << "row " << row << " in " << path << " has " << cells.size() << " cells, expected "
         << header.size();
      throw CsvParseError(os.str(), row, 0);
    }
    std::vector<double> vals(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      char* end = nullptr;
      vals[c] = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str() || *end != '\0') {
        std::ostringstream os;
        os << "non-numeric cell at row " << row << ", column " << c + 1 << " in " << path << ": '"
           << cells[c] << "'";
        throw CsvParseError(os.str(), row, c + 1);
      }
    }
    SwarmState s;
    s.time = vals[0];
    s.positions.resize(n);
    s.velocities.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      s.positions[i] = {vals[1 + 4 * i], vals[2 + 4 * i]};
      s.velocities[i] = {vals[3 + 4 * i], vals[4 + 4 * i]};
    }
    traj.states.push_back(std::move(s));
  }
  if (traj.states.size() >= 2) traj.dt = traj.states[1].time - traj.states[0].time;
  traj.params_used.n_agents = n;
  if (traj.dt > 0.0) traj.params_used.dt = traj.dt;
  return traj;
}

void write_trajectory_metadata(const Trajectory& traj, const std::string& path,
                               const std::vector<std::pair<std::string, std::string>>& extra) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const SwarmParams& p = traj.params_used;
  out << "n_agents = " << p.n_agents << "\n";
  out << "coupling = " << format_double(p.coupling) << "\n";
  out << "noise_std = " << format_double(p.noise_std) << "\n";
  out << "dt = " << format_double(p.dt) << "\n";
  out << "n_steps = " << p.n_steps << "\n";
  out << "seed = " << p.seed << "\n";
  out << "noise_scaling = " << (p.noise_scaling == NoiseScaling::SqrtDt ? "sqrt_dt" : "dt") << "\n";
  out << "samples = " << traj.size() << "\n";
  for (const auto& [k, v] : extra) out << k << " = " << v << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace swarmsid
