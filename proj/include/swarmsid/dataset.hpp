#pragma once

#include <span>
#include <string>

#include "swarmsid/array.hpp"
#include "swarmsid/simulator.hpp"
#include "swarmsid/trajectory.hpp"

namespace swarmsid {

/// One training pair: input window (window_len, 4N) and the following step
/// (4N). Features per step are [x, y, vx, vy] per agent, agents in index order.
struct WindowedSample {
  Array input;
  Array target;
};

enum class Phase { Transient, Steady };
enum class IcMatch { SameAsTest, Different };

const char* to_string(Phase p);
const char* to_string(IcMatch m);

struct Methodology {
  Phase phase = Phase::Steady;
  IcMatch ic_match = IcMatch::SameAsTest;
};

struct SplitSpec {
  std::size_t train_len = 2000;
  std::size_t test_len = 1000;
  std::size_t window_len = 5;

  void validate() const;
  /// Steady: 2000/1000; transient: 150/100.
  static SplitSpec for_phase(Phase phase);
};

std::vector<double> state_features(const SwarmState& state);
SwarmState state_from_features(std::span<const double> features, double time);

/// (len - window_len) sliding samples; sample k covers steps [k, k+window_len)
/// with step k+window_len as target.
std::vector<WindowedSample> fold_windows(const Trajectory& traj, std::size_t window_len);

/// Same, but targeting the horizon-th step after the window.
std::vector<WindowedSample> fold_windows_horizon(const Trajectory& traj, std::size_t window_len,
                                                 std::size_t horizon);

struct MethodologyData {
  std::vector<WindowedSample> train_samples;
  Trajectory train_run;   // full training simulation
  Trajectory test_run;    // equals train_run when ic_match = SameAsTest
  Trajectory test_traj;   // last test_len states of test_run
  Array seed_window;      // (window_len, 4N): test_run states just before the test segment
};

/// Builds one methodology cell. Both runs cover train_len + test_len states;
/// the test run reuses the training seed for SameAsTest and test_seed
/// otherwise, so Different with test_seed == train_seed degenerates to
/// SameAsTest exactly.
MethodologyData build_methodology(const Methodology& methodology, const SwarmParams& base_params,
                                  const SplitSpec& split, std::uint64_t train_seed,
                                  std::uint64_t test_seed, const InitRanges& ranges = {});

struct CsvParseError : std::runtime_error {
  std::size_t row;  // 1-based line number
  std::size_t col;  // 1-based column number, 0 if not column-specific
  CsvParseError(const std::string& msg, std::size_t r, std::size_t c)
      : std::runtime_error(msg), row(r), col(c) {}
};

/// Header t,x0,y0,vx0,vy0,...; 17 significant digits, so the round trip is
/// bit-exact.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory_csv(const std::string& path);

/// key = value sidecar with the generating parameters.
void write_trajectory_metadata(const Trajectory& traj, const std::string& path,
                               const std::vector<std::pair<std::string, std::string>>& extra = {});

}  // namespace swarmsid
