#include "swarmsid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "swarmsid/serialize.hpp"

namespace swarmsid {

double MfeSeries::median() const {
  if (values.empty()) return 0.0;
  std::vector<double> v = values;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double MfeSeries::tail_mean(double tail_frac) const {
  if (values.empty()) return 0.0;
  std::size_t count = static_cast<std::size_t>(
      std::llround(tail_frac * static_cast<double>(values.size())));
  count = std::clamp<std::size_t>(count, 1, values.size());
  double s = 0.0;
  for (std::size_t i = values.size() - count; i < values.size(); ++i) s += values[i];
  return s / static_cast<double>(count);
}

double MfeSeries::trend_slope() const {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean_x = 0.5 * static_cast<double>(n - 1);
  double mean_y = 0.0;
  for (double v : values) mean_y += v;
  mean_y /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - mean_x;
    sxy += dx * (values[i] - mean_y);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

Vec2 mean_field(const SwarmState& state) {
  const std::size_t n = state.n_agents();
  if (n == 0) throw std::invalid_argument("mean_field of an empty state");
  Vec2 m{};
  for (const Vec2& p : state.positions) m += p;
  return m * (1.0 / static_cast<double>(n));
}

double mfe(const SwarmState& truth, const SwarmState& predicted) {
  return (mean_field(truth) - mean_field(predicted)).norm();
}

MfeSeries mfe_series(const Trajectory& truth, const Trajectory& predicted) {
  MfeSeries s;
  s.dt = truth.dt != 0.0 ? truth.dt : predicted.dt;
  const std::size_t n = std::min(truth.size(), predicted.size());
  s.truncated = truth.size() != predicted.size();
  s.values.reserve(n);
  for (std::size_t k = 0; k < n; ++k) s.values.push_back(mfe(truth.states[k], predicted.states[k]));
  s.t0 = n > 0 ? truth.states[0].time : 0.0;
  return s;
}

SteadyDescriptors steady_descriptors(const Trajectory& traj, double tail_frac) {
  if (traj.empty()) throw std::invalid_argument("steady_descriptors of an empty trajectory");
  if (!(tail_frac > 0.0 && tail_frac <= 1.0))
    throw std::invalid_argument("tail_frac must be in (0, 1]");
  std::size_t count =
      static_cast<std::size_t>(std::llround(tail_frac * static_cast<double>(traj.size())));
  count = std::clamp<std::size_t>(count, 1, traj.size());
  const std::size_t begin = traj.size() - count;
  const std::size_t n = traj.n_agents();

  SteadyDescriptors out;
  double radius_sum = 0.0, radius_sq = 0.0, speed_sum = 0.0, pol_sum = 0.0;
  for (std::size_t k = begin; k < traj.size(); ++k) {
    const SwarmState& s = traj.states[k];
    const Vec2 mf = mean_field(s);
    Vec2 vsum{};
    double sp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = (s.positions[i] - mf).norm();
      radius_sum += r;
      radius_sq += r * r;
      vsum += s.velocities[i];
      sp += s.velocities[i].norm();
    }
    speed_sum += sp / static_cast<double>(n);
    pol_sum += sp > 0.0 ? vsum.norm() / sp : 0.0;
  }
  const double m = static_cast<double>(count) * static_cast<double>(n);
  out.ring_radius_mean = radius_sum / m;
  const double var = std::max(0.0, radius_sq / m - out.ring_radius_mean * out.ring_radius_mean);
  out.ring_radius_cv = out.ring_radius_mean > 0.0 ? std::sqrt(var) / out.ring_radius_mean : 0.0;
  out.mean_speed = speed_sum / static_cast<double>(count);
  out.polarization = pol_sum / static_cast<double>(count);
  return out;
}

void write_mfe_csv(const MfeSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "t,mfe\n";
  for (std::size_t k = 0; k < series.values.size(); ++k)
    out << format_double(series.t0 + static_cast<double>(k) * series.dt) << ","
        << format_double(series.values[k]) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace swarmsid
