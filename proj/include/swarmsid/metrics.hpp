#pragma once

#include <string>

#include "swarmsid/trajectory.hpp"

namespace swarmsid {

/// Per-step mean field error between two trajectories.
struct MfeSeries {
  std::vector<double> values;
  double dt = 0.0;
  double t0 = 0.0;
  bool truncated = false;  // set when the inputs had different lengths

  double median() const;
  double tail_mean(double tail_frac) const;
  /// Least-squares slope of value against step index.
  double trend_slope() const;
};

/// Arithmetic mean of agent positions.
Vec2 mean_field(const SwarmState& state);

/// Euclidean distance between the two mean fields. Agent counts may differ;
/// only the means enter.
double mfe(const SwarmState& truth, const SwarmState& predicted);

/// Per-step mfe over the common prefix; `truncated` flags a length mismatch.
MfeSeries mfe_series(const Trajectory& truth, const Trajectory& predicted);

struct SteadyDescriptors {
  double mean_speed = 0.0;
  double ring_radius_mean = 0.0;
  double ring_radius_cv = 0.0;
  double polarization = 0.0;
};

/// Statistics over the tail window, radii measured from the per-step mean field.
SteadyDescriptors steady_descriptors(const Trajectory& traj, double tail_frac);

/// Two-column CSV (t, mfe).
void write_mfe_csv(const MfeSeries& series, const std::string& path);

}  // namespace swarmsid
