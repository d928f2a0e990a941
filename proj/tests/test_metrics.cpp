#include <doctest.h>

#include <cmath>
#include <fstream>

#include "support/oracles.hpp"
#include "swarmsid/metrics.hpp"

using namespace swarmsid;

namespace {

constexpr double kPi = 3.14159265358979323846;

SwarmState two_agents(Vec2 p0, Vec2 p1) {
  SwarmState s;
  s.positions = {p0, p1};
  s.velocities = {{0.0, 0.0}, {0.0, 0.0}};
  return s;
}

// independent recomputation with a different accumulation order
Vec2 mean_field_reversed(const SwarmState& s) {
  Vec2 m{};
  for (std::size_t i = s.n_agents(); i-- > 0;) m += s.positions[i];
  return m * (1.0 / static_cast<double>(s.n_agents()));
}

Trajectory constant_traj(const SwarmState& s, std::size_t count, double dt) {
  Trajectory t;
  t.dt = dt;
  for (std::size_t k = 0; k < count; ++k) {
    SwarmState sk = s;
    sk.time = dt * static_cast<double>(k);
    t.states.push_back(std::move(sk));
  }
  return t;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("mean field examples") {
  SwarmState one;
  one.positions = {{2.0, -3.0}};
  one.velocities = {{0.0, 0.0}};
  CHECK(mean_field(one).x == doctest::Approx(2.0));
  CHECK(mean_field(one).y == doctest::Approx(-3.0));

  const SwarmState pair = two_agents({0.0, 0.0}, {2.0, 2.0});
  CHECK(mean_field(pair).x == doctest::Approx(1.0));
  CHECK(mean_field(pair).y == doctest::Approx(1.0));

  SwarmState empty;
  CHECK_THROWS_AS(mean_field(empty), std::invalid_argument);
}

TEST_CASE("mfe examples: identity, 3-4-5 offset, resummation oracle") {
  const SwarmState a = oracles::random_state(6);
  CHECK(mfe(a, a) == 0.0);

  SwarmState b = a;
  for (Vec2& p : b.positions) p += Vec2{3.0, 4.0};
  CHECK(mfe(a, b) == doctest::Approx(5.0).epsilon(1e-12));

  for (int trial = 0; trial < 20; ++trial) {
    const SwarmState x = oracles::random_state(9);
    const SwarmState y = oracles::random_state(9);
    const double direct = mfe(x, y);
    const double oracle = (mean_field_reversed(x) - mean_field_reversed(y)).norm();
    CHECK(std::abs(direct - oracle) < 1e-12);
  }
}

TEST_CASE("mfe is symmetric, permutation-invariant, translation-invariant, triangular") {
  const SwarmState a = oracles::random_state(7);
  const SwarmState b = oracles::random_state(7);
  const SwarmState c = oracles::random_state(7);
  CHECK(mfe(a, b) == doctest::Approx(mfe(b, a)).epsilon(1e-15));
  CHECK(mfe(a, c) <= mfe(a, b) + mfe(b, c) + 1e-12);

  SwarmState shuffled = b;
  std::swap(shuffled.positions[0], shuffled.positions[5]);
  std::swap(shuffled.positions[2], shuffled.positions[6]);
  CHECK(mfe(a, shuffled) == doctest::Approx(mfe(a, b)).epsilon(1e-12));

  SwarmState ta = a, tb = b;
  for (Vec2& p : ta.positions) p += Vec2{-1.3, 0.9};
  for (Vec2& p : tb.positions) p += Vec2{-1.3, 0.9};
  CHECK(mfe(ta, tb) == doctest::Approx(mfe(a, b)).epsilon(1e-10));
}

TEST_CASE("mfe tolerates different agent counts") {
  const SwarmState a = two_agents({1.0, 0.0}, {3.0, 0.0});  // mean (2, 0)
  SwarmState b;
  b.positions = {{2.0, 1.0}};
  b.velocities = {{0.0, 0.0}};
  CHECK(mfe(a, b) == doctest::Approx(1.0));
}

TEST_CASE("mfe series: self comparison, offset, and length mismatch") {
  const Trajectory t = constant_traj(oracles::random_state(5), 12, 0.1);
  const MfeSeries self = mfe_series(t, t);
  CHECK(self.values.size() == 12);
  CHECK_FALSE(self.truncated);
  for (double v : self.values) CHECK(v == 0.0);

  Trajectory shifted = t;
  for (SwarmState& s : shifted.states)
    for (Vec2& p : s.positions) p += Vec2{0.6, -0.8};
  const MfeSeries off = mfe_series(t, shifted);
  for (double v : off.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  Trajectory shorter = t;
  shorter.states.pop_back();
  const MfeSeries trunc = mfe_series(t, shorter);
  CHECK(trunc.truncated);
  CHECK(trunc.values.size() == 11);
}

TEST_CASE("steady descriptors on an exact unit ring") {
  const std::size_t n = 10;
  SwarmState s;
  for (std::size_t i = 0; i < n; ++i) {
    const double th = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    s.positions.push_back({std::cos(th), std::sin(th)});
    s.velocities.push_back({-std::sin(th), std::cos(th)});
  }
  const SteadyDescriptors d = steady_descriptors(constant_traj(s, 20, 0.05), 0.2);
  CHECK(d.mean_speed == doctest::Approx(1.0));
  CHECK(d.ring_radius_mean == doctest::Approx(1.0));
  CHECK(d.ring_radius_cv == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("co-located agents have zero ring radius") {
  SwarmState s;
  for (int i = 0; i < 4; ++i) {
    s.positions.push_back({0.7, -0.2});
    s.velocities.push_back({0.3, 0.4});
  }
  const SteadyDescriptors d = steady_descriptors(constant_traj(s, 10, 0.1), 1.0);
  CHECK(d.ring_radius_mean == doctest::Approx(0.0));
  CHECK(d.mean_speed == doctest::Approx(0.5));
}

TEST_CASE("doubling positions about the mean field doubles the radius only") {
  const SwarmState base = oracles::random_state(8);
  Trajectory t1 = constant_traj(base, 10, 0.1);
  SwarmState doubled = base;
  const Vec2 mf = mean_field(base);
  for (Vec2& p : doubled.positions) p = mf + 2.0 * (p - mf);
  Trajectory t2 = constant_traj(doubled, 10, 0.1);
  const SteadyDescriptors d1 = steady_descriptors(t1, 0.5);
  const SteadyDescriptors d2 = steady_descriptors(t2, 0.5);
  CHECK(d2.ring_radius_mean == doctest::Approx(2.0 * d1.ring_radius_mean).epsilon(1e-10));
  CHECK(d2.polarization == doctest::Approx(d1.polarization).epsilon(1e-12));
}

TEST_CASE("mfe series exports as two-column csv") {
  MfeSeries s;
  s.dt = 0.5;
  s.t0 = 1.0;
  s.values = {0.0, 0.25, 0.5};
  const std::string path = "/tmp/swarmsid_test_mfe.csv";
  write_mfe_csv(s, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,mfe");
  std::getline(in, line);
  CHECK(line == "1,0");
  std::getline(in, line);
  CHECK(line == "1.5,0.25");
}

TEST_CASE("series statistics: median, tail mean, trend slope") {
  MfeSeries s;
  s.values = {1.0, 2.0, 3.0, 4.0};
  CHECK(s.median() == doctest::Approx(2.5));
  CHECK(s.tail_mean(0.5) == doctest::Approx(3.5));
  CHECK(s.trend_slope() == doctest::Approx(1.0));
  s.values = {5.0, 4.0, 3.0};
  CHECK(s.median() == doctest::Approx(4.0));
  CHECK(s.trend_slope() == doctest::Approx(-1.0));
}

}  // TEST_SUITE
