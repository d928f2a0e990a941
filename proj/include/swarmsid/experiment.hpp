#pragma once

#include <string>
#include <vector>

#include "swarmsid/config.hpp"
#include "swarmsid/dataset.hpp"
#include "swarmsid/node.hpp"
#include "swarmsid/regime.hpp"

namespace swarmsid {

/// Fully resolved experiment cell; every artifact is a deterministic function
/// of this value.
struct ExperimentConfig {
  SwarmParams sim;                // sim.seed doubles as the training-run seed
  std::uint64_t test_seed = 1;
  Methodology methodology;
  SplitSpec split;                // phase defaults unless overridden
  std::string model = "rnn";      // ols | mlp | rnn | cnn | node | truth

  std::size_t epochs = 0;         // 0 = per-model default
  double learning_rate = 0.0;     // 0 = per-model default
  std::size_t batch_size = 0;     // 0 = full batch
  std::size_t hidden = 256;

  std::size_t ols_m = 10;
  std::size_t ols_n = 1;
  double ols_ridge = 0.0;
  bool ols_per_agent = false;

  NodeArchitecture node_arch;
  NodeTrainConfig node_train;
  std::size_t node_segments = 3;
  std::size_t node_segment_len = 50;

  double pos_box = 1.0;           // initial positions uniform in [-box, box]^2
  double vel_box = 1.0;
  double tail_frac = 0.2;
  double regime_window_frac = 0.2;
  RegimeThresholds thresholds;

  std::string out = "out";
  std::vector<std::string> compare_models{"ols", "mlp", "rnn", "cnn", "node"};
  std::vector<std::string> compare_phases{"steady", "transient"};
  std::vector<std::string> compare_ics{"same", "different"};

  static ExperimentConfig from_kv(const KvConfig& kv);
  InitRanges init_ranges() const;
};

void run_simulate(const ExperimentConfig& cfg);
void run_make_dataset(const ExperimentConfig& cfg);
void run_train(const ExperimentConfig& cfg);
void run_evaluate(const ExperimentConfig& cfg);
/// Trains and evaluates every configured (model, methodology) cell, honoring
/// SWARM_SYSID_THREADS, and merges the per-cell summaries into comparison.csv.
void run_compare(const ExperimentConfig& cfg);

}  // namespace swarmsid
