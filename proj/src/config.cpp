#include "swarmsid/config.hpp"

#include <array>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace swarmsid {

namespace {

constexpr std::array kKnownKeys = {
    // simulation
    "n_agents", "coupling", "noise_std", "dt", "n_steps", "seed", "test_seed", "noise_scaling",
    "pos_box", "vel_box",
    // methodology / dataset
    "phase", "ic_match", "window_len", "train_len", "test_len",
    // model selection and shared hyperparameters
    "model", "epochs", "learning_rate", "batch_size", "hidden",
    // ols
    "ols_m", "ols_n", "ols_ridge", "ols_per_agent",
    // neural ode
    "node_hidden", "node_segment_len", "node_segments", "node_epochs", "node_lr",
    "node_solver_step",
    // evaluation / classification
    "tail_frac", "regime_window_frac", "regime_flock_pmin", "regime_ring_cv_max",
    "regime_mill_spread_min", "regime_rot_spread_max", "regime_orbit_cv_max",
    // outputs and the comparison matrix
    "out", "compare_models", "compare_phases", "compare_ics",
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool KvConfig::is_known_key(const std::string& key) {
  return std::find(kKnownKeys.begin(), kKnownKeys.end(), key) != kKnownKeys.end();
}

KvConfig KvConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  KvConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  " is not a key = value assignment: '" + t + "'");
    cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

void KvConfig::set(const std::string& key, const std::string& value) {
  if (!is_known_key(key)) throw std::invalid_argument("unknown config key: '" + key + "'");
  values_[key] = value;
}

void KvConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("expected key=value, got '" + assignment + "'");
  std::string key = assignment.substr(0, eq);
  std::string val = assignment.substr(eq + 1);
  set(trim(key), trim(val));
}

std::string KvConfig::get_str(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0')
    throw std::invalid_argument("config key '" + key + "' is not a number: '" + it->second + "'");
  return v;
}

std::size_t KvConfig::get_size(const std::string& key, std::size_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0')
    throw std::invalid_argument("config key '" + key + "' is not an integer: '" + it->second + "'");
  return static_cast<std::size_t>(v);
}

std::uint64_t KvConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  return static_cast<std::uint64_t>(get_size(key, static_cast<std::size_t>(fallback)));
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw std::invalid_argument("config key '" + key + "' is not a boolean: '" + it->second + "'");
}

}  // namespace swarmsid
