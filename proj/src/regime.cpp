#include "swarmsid/regime.hpp"

#include <cmath>
#include <stdexcept>

#include "swarmsid/metrics.hpp"

namespace swarmsid {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Milling: return "milling";
    case Regime::Rotation: return "rotation";
    case Regime::Flocking: return "flocking";
    case Regime::Unclassified: return "unclassified";
  }
  return "unclassified";
}

Regime regime_from_string(const std::string& s) {
  if (s == "milling") return Regime::Milling;
  if (s == "rotation") return Regime::Rotation;
  if (s == "flocking") return Regime::Flocking;
  if (s == "unclassified") return Regime::Unclassified;
  throw std::invalid_argument("unknown regime name: " + s);
}

RegimeLabel classify_regime(const Trajectory& traj, double window_frac,
                            const RegimeThresholds& th) {
  if (traj.size() < 10) throw std::invalid_argument("trajectory too short to classify (< 10 samples)");
  if (!(window_frac > 0.0 && window_frac <= 1.0))
    throw std::invalid_argument("window_frac must be in (0, 1]");

  const std::size_t len = traj.size();
  std::size_t count = static_cast<std::size_t>(std::llround(window_frac * static_cast<double>(len)));
  count = std::max<std::size_t>(count, 2);
  count = std::min(count, len);
  const std::size_t begin = len - count;
  const std::size_t n = traj.n_agents();

  RegimeDiagnostics d;
  std::vector<Vec2> mf(count);
  double radius_sum = 0.0, radius_sq = 0.0;
  std::size_t radius_n = 0;
  double pol_sum = 0.0;
  double spread_sum = 0.0;

  for (std::size_t k = 0; k < count; ++k) {
    const SwarmState& s = traj.states[begin + k];
    mf[k] = mean_field(s);
    Vec2 vsum{};
    double speed_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = (s.positions[i] - mf[k]).norm();
      radius_sum += r;
      radius_sq += r * r;
      ++radius_n;
      vsum += s.velocities[i];
      speed_sum += s.velocities[i].norm();
    }
    pol_sum += speed_sum > 0.0 ? vsum.norm() / speed_sum : 0.0;
    if (n > 1) {
      double pair_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          pair_sum += (s.positions[i] - s.positions[j]).norm();
      spread_sum += pair_sum / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
    }
  }

  d.polarization = pol_sum / static_cast<double>(count);
  d.ring_radius_mean = radius_sum / static_cast<double>(radius_n);
  const double radius_var =
      std::max(0.0, radius_sq / static_cast<double>(radius_n) - d.ring_radius_mean * d.ring_radius_mean);
  d.ring_radius_cv = d.ring_radius_mean > 0.0 ? std::sqrt(radius_var) / d.ring_radius_mean : 0.0;
  d.cluster_spread = spread_sum / static_cast<double>(count);

  // mean-field orbit about its time-averaged center
  Vec2 center{};
  for (const Vec2& p : mf) center += p;
  center = center * (1.0 / static_cast<double>(count));
  double orb_sum = 0.0, orb_sq = 0.0;
  for (const Vec2& p : mf) {
    const double r = (p - center).norm();
    orb_sum += r;
    orb_sq += r * r;
  }
  d.orbit_radius = orb_sum / static_cast<double>(count);
  const double orb_var =
      std::max(0.0, orb_sq / static_cast<double>(count) - d.orbit_radius * d.orbit_radius);
  d.orbit_radius_cv = d.orbit_radius > 0.0 ? std::sqrt(orb_var) / d.orbit_radius : 0.0;

  double winding = 0.0;
  for (std::size_t k = 1; k < count; ++k) {
    const Vec2 a = mf[k - 1] - center;
    const Vec2 b = mf[k] - center;
    if (a.norm() > 0.0 && b.norm() > 0.0) {
      // signed angle between consecutive mean-field offsets
      winding += std::atan2(a.x * b.y - a.y * b.x, a.x * b.x + a.y * b.y);
    }
  }
  d.winding_angle = winding;

  RegimeLabel out;
  out.diagnostics = d;

  const bool rotation = d.orbit_radius > 1e-9 && d.orbit_radius_cv <= th.orbit_cv_max &&
                        d.cluster_spread <= th.rot_spread_to_orbit_max * d.orbit_radius &&
                        std::abs(d.winding_angle) >= th.min_winding_angle;
  const bool flocking = d.polarization >= th.flock_polarization_min;
  const bool milling = d.ring_radius_mean > 1e-12 && d.ring_radius_cv <= th.ring_cv_max &&
                       d.cluster_spread >= th.mill_spread_to_radius_min * d.ring_radius_mean;

  if (rotation)
    out.regime = Regime::Rotation;
  else if (flocking)
    out.regime = Regime::Flocking;
  else if (milling)
    out.regime = Regime::Milling;
  else
    out.regime = Regime::Unclassified;
  return out;
}

}  // namespace swarmsid
