#pragma once

#include <string>

#include "swarmsid/dataset.hpp"
#include "swarmsid/optimizer.hpp"
#include "swarmsid/params.hpp"
#include "swarmsid/rollout.hpp"
#include "swarmsid/tape.hpp"

namespace swarmsid {

enum class ModelKind { Mlp, Rnn, Cnn };

const char* to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

struct ConvLayerCfg {
  std::size_t kernel = 5;
  std::size_t padding = 2;
  std::size_t stride = 1;
};

/// One-step forecaster architecture. The MLP flattens the window through one
/// tanh hidden layer; the RNN consumes the window stepwise (tanh cell, linear
/// readout of the final hidden state); the CNN convolves the 4N channels over
/// the window with ReLU after each layer and a linear head.
struct ForecasterSpec {
  ModelKind kind = ModelKind::Mlp;
  std::size_t window_len = 5;
  std::size_t io_width = 128;  // 4N
  std::size_t hidden = 256;    // MLP / RNN
  std::size_t rnn_layers = 1;
  std::vector<ConvLayerCfg> conv_layers{{5, 2, 2}, {5, 2, 2}, {3, 1, 1}};

  void validate() const;
  /// Sequence length after the convolution stack.
  std::size_t conv_out_len() const;
};

struct TrainConfig {
  OptimKind optimizer = OptimKind::Sgd;
  double learning_rate = 0.001;
  std::size_t epochs = 500;
  std::size_t batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;
};

/// Learning rates and epoch budgets: MLP 0.001/500, RNN 0.005/50, CNN 0.0005/50.
TrainConfig default_train_config(ModelKind kind);

ParamLayout forecaster_layout(const ForecasterSpec& spec);

/// Single-window prediction; window is (window_len, io_width).
std::vector<double> forecaster_forward(const ForecasterSpec& spec, std::span<const double> params,
                                       const Array& window);

struct TrainingDivergedError : std::runtime_error {
  std::size_t epoch;
  TrainingDivergedError(const std::string& msg, std::size_t e) : std::runtime_error(msg), epoch(e) {}
};

struct TrainResult {
  std::vector<double> params;
  std::vector<double> loss_history;  // one entry per epoch
};

/// Full-batch by default; per-epoch losses are recorded before the update.
/// Deterministic for a fixed config.seed.
TrainResult train_forecaster(const ForecasterSpec& spec, const std::vector<WindowedSample>& samples,
                             const TrainConfig& config);

Trajectory forecaster_rollout(const ForecasterSpec& spec, std::span<const double> params,
                              const Array& seed_window, std::size_t n_steps, double dt,
                              double t_start);

void save_forecaster(const std::string& path, const ForecasterSpec& spec,
                     std::span<const double> params);
std::pair<ForecasterSpec, std::vector<double>> load_forecaster(const std::string& path);

}  // namespace swarmsid
