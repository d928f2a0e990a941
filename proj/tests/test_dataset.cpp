#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "support/oracles.hpp"
#include "swarmsid/dataset.hpp"

using namespace swarmsid;

namespace {

Trajectory small_run(std::size_t n_agents, std::size_t states, std::uint64_t seed,
                     double noise = 0.01) {
  SwarmParams params;
  params.n_agents = n_agents;
  params.noise_std = noise;
  params.dt = 0.05;
  params.n_steps = states - 1;
  params.seed = seed;
  return simulate(params, sample_initial_conditions(n_agents, {}, seed));
}

bool states_equal(const SwarmState& a, const SwarmState& b) {
  for (std::size_t i = 0; i < a.n_agents(); ++i)
    if (a.positions[i].x != b.positions[i].x || a.positions[i].y != b.positions[i].y ||
        a.velocities[i].x != b.velocities[i].x || a.velocities[i].y != b.velocities[i].y)
      return false;
  return a.n_agents() == b.n_agents();
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("fold counts and shapes") {
  const Trajectory t250 = small_run(2, 250, 1);
  CHECK(fold_windows(t250, 5).size() == 245);

  const Trajectory t32 = small_run(32, 8, 2);
  const auto samples = fold_windows(t32, 5);
  REQUIRE_FALSE(samples.empty());
  CHECK(samples[0].input.shape == std::vector<std::size_t>{5, 128});
  CHECK(samples[0].input.size() == 5 * 128);
  CHECK(samples[0].target.shape == std::vector<std::size_t>{128});

  const Trajectory t10 = small_run(2, 10, 3);
  CHECK(fold_windows(t10, 9).size() == 1);
  CHECK_THROWS_AS(fold_windows(t10, 10), std::invalid_argument);
}

TEST_CASE("consecutive samples overlap in window_len - 1 steps") {
  const Trajectory t = small_run(3, 40, 4);
  const auto samples = fold_windows(t, 6);
  const std::size_t width = 4 * 3;
  for (std::size_t k = 0; k + 1 < samples.size(); ++k)
    for (std::size_t row = 0; row + 1 < 6; ++row)
      for (std::size_t c = 0; c < width; ++c)
        CHECK(samples[k].input.at(row + 1, c) == samples[k + 1].input.at(row, c));
}

TEST_CASE("every sample reassembles a contiguous slice of the source") {
  const Trajectory t = small_run(2, 30, 5);
  const auto samples = fold_windows(t, 4);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    for (std::size_t row = 0; row < 4; ++row) {
      const auto want = state_features(t.states[k + row]);
      for (std::size_t c = 0; c < want.size(); ++c) CHECK(samples[k].input.at(row, c) == want[c]);
    }
    const auto target = state_features(t.states[k + 4]);
    CHECK(samples[k].target.data == target);
  }
}

TEST_CASE("horizon folding targets the n-th step ahead") {
  const Trajectory t = small_run(2, 20, 6);
  const auto samples = fold_windows_horizon(t, 3, 2);
  CHECK(samples.size() == 20 - 3 - 2 + 1);
  CHECK(samples[0].target.data == state_features(t.states[4]));
}

TEST_CASE("feature ordering is x, y, vx, vy per agent") {
  SwarmState s;
  s.positions = {{1.0, 2.0}, {5.0, 6.0}};
  s.velocities = {{3.0, 4.0}, {7.0, 8.0}};
  CHECK(state_features(s) == std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8});
  const SwarmState back = state_from_features(state_features(s), 0.0);
  CHECK(states_equal(s, back));
}

TEST_CASE("steady methodology: 2000/1000 with the test continuing the run") {
  SwarmParams base;
  base.n_agents = 2;
  base.noise_std = 1e-3;
  base.dt = 0.05;
  const SplitSpec split = SplitSpec::for_phase(Phase::Steady);
  CHECK(split.train_len == 2000);
  CHECK(split.test_len == 1000);
  const MethodologyData data =
      build_methodology({Phase::Steady, IcMatch::SameAsTest}, base, split, 10, 20);
  CHECK(data.train_samples.size() == 2000 - 5);
  CHECK(data.test_traj.size() == 1000);
  CHECK(data.train_run.size() == 3000);
  CHECK(states_equal(data.test_traj.states[0], data.train_run.states[2000]));
  // seed window holds the last window_len training states of the test run
  const auto want = state_features(data.test_run.states[1999]);
  for (std::size_t c = 0; c < want.size(); ++c) CHECK(data.seed_window.at(4, c) == want[c]);
}

TEST_CASE("transient methodology: 150/100") {
  SwarmParams base;
  base.n_agents = 2;
  base.noise_std = 1e-3;
  const SplitSpec split = SplitSpec::for_phase(Phase::Transient);
  const MethodologyData data =
      build_methodology({Phase::Transient, IcMatch::SameAsTest}, base, split, 10, 20);
  CHECK(data.train_samples.size() == 150 - 5);
  CHECK(data.test_traj.size() == 100);
  CHECK(data.train_run.size() == 250);
}

TEST_CASE("different initial conditions with equal seeds degenerate to same-as-test") {
  SwarmParams base;
  base.n_agents = 3;
  base.noise_std = 1e-3;
  SplitSpec split = SplitSpec::for_phase(Phase::Transient);
  const MethodologyData same =
      build_methodology({Phase::Transient, IcMatch::SameAsTest}, base, split, 7, 7);
  const MethodologyData diff =
      build_methodology({Phase::Transient, IcMatch::Different}, base, split, 7, 7);
  REQUIRE(same.test_traj.size() == diff.test_traj.size());
  for (std::size_t k = 0; k < same.test_traj.size(); ++k)
    CHECK(states_equal(same.test_traj.states[k], diff.test_traj.states[k]));
  CHECK(same.seed_window.data == diff.seed_window.data);
}

TEST_CASE("different initial conditions actually differ for distinct seeds") {
  SwarmParams base;
  base.n_agents = 3;
  base.noise_std = 1e-3;
  SplitSpec split = SplitSpec::for_phase(Phase::Transient);
  const MethodologyData data =
      build_methodology({Phase::Transient, IcMatch::Different}, base, split, 7, 8);
  CHECK_FALSE(states_equal(data.train_run.states[0], data.test_run.states[0]));
  CHECK_FALSE(data.train_samples.empty());
}

TEST_CASE("csv round trip is bit-exact") {
  const Trajectory t = small_run(3, 40, 9, 0.05);
  const std::string path = "/tmp/swarmsid_test_traj.csv";
  write_trajectory_csv(t, path);
  const Trajectory back = read_trajectory_csv(path);
  REQUIRE(back.size() == t.size());
  CHECK(back.n_agents() == 3);
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK(states_equal(t.states[k], back.states[k]));
    CHECK(t.states[k].time == back.states[k].time);
  }
  CHECK(back.dt == doctest::Approx(t.dt).epsilon(1e-15));
}

TEST_CASE("csv header names columns per agent") {
  const Trajectory t = small_run(2, 5, 10);
  const std::string path = "/tmp/swarmsid_test_header.csv";
  write_trajectory_csv(t, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x0,y0,vx0,vy0,x1,y1,vx1,vy1");
}

TEST_CASE("csv errors name the row and column") {
  const std::string path = "/tmp/swarmsid_test_bad.csv";
  {
    std::ofstream out(path);
    out << "t,x0,y0,vx0,vy0\n";
    out << "0,1,2,3,4\n";
    out << "0.05,1,2,3\n";  // ragged row
  }
  try {
    read_trajectory_csv(path);
    FAIL("expected CsvParseError");
  } catch (const CsvParseError& e) {
    CHECK(e.row == 3);
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }

  {
    std::ofstream out(path);
    out << "t,x0,y0,vx0,vy0\n";
    out << "0,1,oops,3,4\n";
  }
  try {
    read_trajectory_csv(path);
    FAIL("expected CsvParseError");
  } catch (const CsvParseError& e) {
    CHECK(e.row == 2);
    CHECK(e.col == 3);
  }

  {
    std::ofstream out(path);
    out << "time,x0,y0\n";
  }
  CHECK_THROWS_AS(read_trajectory_csv(path), CsvParseError);
}

TEST_CASE("metadata sidecar records the generating parameters") {
  const Trajectory t = small_run(2, 12, 11);
  const std::string path = "/tmp/swarmsid_test_meta.txt";
  write_trajectory_metadata(t, path, {{"regime", "milling"}});
  std::ifstream in(path);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(all.find("n_agents = 2") != std::string::npos);
  CHECK(all.find("seed = 11") != std::string::npos);
  CHECK(all.find("regime = milling") != std::string::npos);
}

TEST_CASE("split spec validation") {
  SplitSpec s;
  s.train_len = 5;
  s.window_len = 5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.train_len = 6;
  CHECK_NOTHROW(s.validate());
}

}  // TEST_SUITE
