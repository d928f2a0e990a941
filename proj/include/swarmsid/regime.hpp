#pragma once

#include <string>

#include "swarmsid/trajectory.hpp"

namespace swarmsid {

enum class Regime { Milling, Rotation, Flocking, Unclassified };

const char* to_string(Regime r);
Regime regime_from_string(const std::string& s);

/// Tail-window statistics backing a regime decision. Ring radii are measured
/// from the per-step mean field; orbit quantities describe the path of the
/// mean field itself about its time-averaged center.
struct RegimeDiagnostics {
  double polarization = 0.0;      // |sum v| / sum |v|, averaged over the window
  double ring_radius_mean = 0.0;
  double ring_radius_cv = 0.0;
  double cluster_spread = 0.0;    // mean pairwise distance
  double orbit_radius = 0.0;
  double orbit_radius_cv = 0.0;
  double winding_angle = 0.0;     // total angle swept by the mean field, radians
};

struct RegimeThresholds {
  double flock_polarization_min = 0.9;
  double ring_cv_max = 0.2;
  // milling needs the agents spread around the ring, not collapsed on it:
  // cluster_spread >= mill_spread_to_radius_min * ring_radius_mean
  double mill_spread_to_radius_min = 0.8;
  // rotation needs a tight cluster relative to the mean-field orbit:
  // cluster_spread <= rot_spread_to_orbit_max * orbit_radius
  double rot_spread_to_orbit_max = 0.5;
  double orbit_cv_max = 0.2;
  double min_winding_angle = 3.14159265358979323846;  // at least half a turn
};

struct RegimeLabel {
  Regime regime = Regime::Unclassified;
  RegimeDiagnostics diagnostics;
};

/// Classifies the tail window (last window_frac of the samples).
///
/// Rotation is tested before flocking: a tight cluster revolving on a circle
/// is near-perfectly polarized at every instant, so the polarization test
/// alone cannot separate the two; the circularity of the mean-field path can.
RegimeLabel classify_regime(const Trajectory& traj, double window_frac,
                            const RegimeThresholds& thresholds = {});

}  // namespace swarmsid
