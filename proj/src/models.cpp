#include "swarmsid/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "swarmsid/serialize.hpp"

namespace swarmsid {

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Mlp: return "mlp";
    case ModelKind::Rnn: return "rnn";
    case ModelKind::Cnn: return "cnn";
  }
  return "mlp";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "mlp") return ModelKind::Mlp;
  if (s == "rnn") return ModelKind::Rnn;
  if (s == "cnn") return ModelKind::Cnn;
  throw std::invalid_argument("unknown model kind: " + s);
}

void ForecasterSpec::validate() const {
  if (window_len == 0 || io_width == 0 || io_width % 4 != 0)
    throw std::invalid_argument("forecaster spec: window_len > 0 and io_width a multiple of 4 required");
  if (kind != ModelKind::Cnn && hidden == 0)
    throw std::invalid_argument("forecaster spec: hidden must be positive");
  if (kind == ModelKind::Rnn && rnn_layers != 1)
    throw std::invalid_argument("forecaster spec: only single-layer RNNs are supported");
  if (kind == ModelKind::Cnn && conv_out_len() == 0)
    throw std::invalid_argument("forecaster spec: convolution stack collapses the window to nothing");
}

std::size_t ForecasterSpec::conv_out_len() const {
  std::size_t len = window_len;
  for (const ConvLayerCfg& c : conv_layers) {
    len = Tape::conv1d_output_len(len, c.kernel, c.padding, c.stride);
    if (len == 0) return 0;
  }
  return len;
}

TrainConfig default_train_config(ModelKind kind) {
  TrainConfig c;
  c.optimizer = OptimKind::Sgd;
  switch (kind) {
    case ModelKind::Mlp:
      c.learning_rate = 0.001;
      c.epochs = 500;
      break;
    case ModelKind::Rnn:
      c.learning_rate = 0.005;
      c.epochs = 50;
      break;
    case ModelKind::Cnn:
      c.learning_rate = 0.0005;
      c.epochs = 50;
      break;
  }
  return c;
}

ParamLayout forecaster_layout(const ForecasterSpec& spec) {
  spec.validate();
  ParamLayout l;
  const std::size_t in = spec.window_len * spec.io_width;
  const std::size_t out = spec.io_width;
  switch (spec.kind) {
    case ModelKind::Mlp:
      l.add("w1", {in, spec.hidden}, in);
      l.add("b1", {spec.hidden}, in);
      l.add("w2", {spec.hidden, out}, spec.hidden);
      l.add("b2", {out}, spec.hidden);
      break;
    case ModelKind::Rnn:
      l.add("wxh", {spec.io_width, spec.hidden}, spec.io_width);
      l.add("whh", {spec.hidden, spec.hidden}, spec.hidden);
      l.add("bh", {spec.hidden}, spec.hidden);
      l.add("why", {spec.hidden, out}, spec.hidden);
      l.add("by", {out}, spec.hidden);
      break;
    case ModelKind::Cnn: {
      const std::size_t ch = spec.io_width;
      for (std::size_t i = 0; i < spec.conv_layers.size(); ++i) {
        const ConvLayerCfg& c = spec.conv_layers[i];
        l.add("conv_w" + std::to_string(i), {ch, ch, c.kernel}, ch * c.kernel);
        l.add("conv_b" + std::to_string(i), {ch}, ch * c.kernel);
      }
      const std::size_t flat = ch * spec.conv_out_len();
      l.add("head_w", {flat, out}, flat);
      l.add("head_b", {out}, flat);
      break;
    }
  }
  return l;
}

namespace {

std::vector<Tape::NodeId> make_param_nodes(Tape& tape, const ParamLayout& layout,
                                           std::span<const double> params) {
  if (params.size() != layout.total) {
    std::ostringstream os;
    os << "parameter vector length " << params.size() << " does not match layout total "
       << layout.total;
    throw ShapeError(os.str());
  }
  std::vector<Tape::NodeId> ids;
  ids.reserve(layout.entries.size());
  for (const ParamEntry& e : layout.entries) {
    std::vector<double> v(params.begin() + static_cast<long>(e.offset),
                          params.begin() + static_cast<long>(e.offset + shape_size(e.shape)));
    ids.push_back(tape.param(Array(e.shape, std::move(v))));
  }
  return ids;
}

// batched inputs prepared per model kind
struct BatchInputs {
  Array mlp_x;                // (B, window*width)
  std::vector<Array> rnn_x;   // window arrays of (B, width)
  Array cnn_x;                // (B, width, window)
  Array targets;              // (B, width)
};

BatchInputs prepare_inputs(const ForecasterSpec& spec, const std::vector<WindowedSample>& samples,
                           const std::vector<std::size_t>& idx, bool with_targets) {
  const std::size_t b = idx.size();
  const std::size_t w = spec.window_len, width = spec.io_width;
  BatchInputs in;
  switch (spec.kind) {
    case ModelKind::Mlp: {
      in.mlp_x = Array({b, w * width});
      for (std::size_t s = 0; s < b; ++s)
        std::copy(samples[idx[s]].input.data.begin(), samples[idx[s]].input.data.end(),
                  in.mlp_x.data.begin() + static_cast<long>(s * w * width));
      break;
    }
    case ModelKind::Rnn: {
      in.rnn_x.resize(w, Array({b, width}));
      for (std::size_t s = 0; s < b; ++s)
        for (std::size_t t = 0; t < w; ++t)
          std::copy(samples[idx[s]].input.data.begin() + static_cast<long>(t * width),
                    samples[idx[s]].input.data.begin() + static_cast<long>((t + 1) * width),
                    in.rnn_x[t].data.begin() + static_cast<long>(s * width));
      break;
    }
    case ModelKind::Cnn: {
      in.cnn_x = Array({b, width, w});
      for (std::size_t s = 0; s < b; ++s)
        for (std::size_t t = 0; t < w; ++t)
          for (std::size_t c = 0; c < width; ++c)
            in.cnn_x.data[(s * width + c) * w + t] = samples[idx[s]].input.at(t, c);
      break;
    }
  }
  if (with_targets) {
    in.targets = Array({b, width});
    for (std::size_t s = 0; s < b; ++s)
      std::copy(samples[idx[s]].target.data.begin(), samples[idx[s]].target.data.end(),
                in.targets.data.begin() + static_cast<long>(s * width));
  }
  return in;
}

Tape::NodeId forward_batch(Tape& tape, const ForecasterSpec& spec,
                           const std::vector<Tape::NodeId>& p, BatchInputs& in) {
  switch (spec.kind) {
    case ModelKind::Mlp: {
      const Tape::NodeId x = tape.constant(std::move(in.mlp_x));
      const Tape::NodeId h = tape.tanh(tape.add(tape.matmul(x, p[0]), p[1]));
      return tape.add(tape.matmul(h, p[2]), p[3]);
    }
    case ModelKind::Rnn: {
      const std::size_t b = in.rnn_x[0].rows();
      Tape::NodeId h = tape.constant(Array::zeros({b, spec.hidden}));
      for (std::size_t t = 0; t < spec.window_len; ++t) {
        const Tape::NodeId xt = tape.constant(std::move(in.rnn_x[t]));
        h = tape.tanh(tape.add(tape.add(tape.matmul(xt, p[0]), tape.matmul(h, p[1])), p[2]));
      }
      return tape.add(tape.matmul(h, p[3]), p[4]);
    }
    case ModelKind::Cnn: {
      const std::size_t b = in.cnn_x.dim(0);
      Tape::NodeId h = tape.constant(std::move(in.cnn_x));
      for (std::size_t i = 0; i < spec.conv_layers.size(); ++i) {
        const ConvLayerCfg& c = spec.conv_layers[i];
        h = tape.relu(tape.add(tape.conv1d(h, p[2 * i], c.padding, c.stride), p[2 * i + 1]));
      }
      const std::size_t flat = spec.io_width * spec.conv_out_len();
      const Tape::NodeId hf = tape.reshape(h, {b, flat});
      const std::size_t base = 2 * spec.conv_layers.size();
      return tape.add(tape.matmul(hf, p[base]), p[base + 1]);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

std::vector<double> forecaster_forward(const ForecasterSpec& spec, std::span<const double> params,
                                       const Array& window) {
  spec.validate();
  if (window.rank() != 2 || window.rows() != spec.window_len || window.cols() != spec.io_width)
    throw ShapeError("forward: window shape " + window.shape_str() + " does not match spec");
  const ParamLayout layout = forecaster_layout(spec);
  std::vector<WindowedSample> one(1);
  one[0].input = window;
  one[0].target = Array({spec.io_width});
  Tape tape;
  const std::vector<Tape::NodeId> p = make_param_nodes(tape, layout, params);
  BatchInputs in = prepare_inputs(spec, one, {0}, false);
  const Tape::NodeId out = forward_batch(tape, spec, p, in);
  return tape.value(out).data;
}

TrainResult train_forecaster(const ForecasterSpec& spec, const std::vector<WindowedSample>& samples,
                             const TrainConfig& config) {
  spec.validate();
  if (samples.empty()) throw std::invalid_argument("train: empty dataset");
  if (config.epochs == 0) throw std::invalid_argument("train: epochs must be positive");
  const ParamLayout layout = forecaster_layout(spec);

  TrainResult result;
  result.params = init_params(layout, config.seed);
  result.loss_history.reserve(config.epochs);

  OptimizerState opt = config.optimizer == OptimKind::Adam
                           ? OptimizerState::adam(config.learning_rate)
                           : OptimizerState::sgd(config.learning_rate);

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = config.batch_size == 0 ? samples.size() : config.batch_size;
  std::mt19937_64 shuffle_rng(config.seed ^ 0x5bf03635c1f9eea7ull);

  std::vector<double> grads(layout.total);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.batch_size != 0) std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < samples.size(); start += batch) {
      const std::size_t end = std::min(samples.size(), start + batch);
      const std::vector<std::size_t> idx(order.begin() + static_cast<long>(start),
                                         order.begin() + static_cast<long>(end));
      Tape tape;
      const std::vector<Tape::NodeId> p = make_param_nodes(tape, layout, result.params);
      BatchInputs in = prepare_inputs(spec, samples, idx, true);
      const Tape::NodeId target = tape.constant(std::move(in.targets));
      const Tape::NodeId out = forward_batch(tape, spec, p, in);
      const Tape::NodeId loss = tape.mse(out, target);
      const double loss_v = tape.value(loss).data[0];
      if (!std::isfinite(loss_v)) {
        std::ostringstream os;
        os << "training diverged at epoch " << epoch << " (non-finite loss)";
        throw TrainingDivergedError(os.str(), epoch);
      }
      tape.backward(loss);
      for (std::size_t e = 0; e < layout.entries.size(); ++e) {
        const Array& g = tape.grad(p[e]);
        const std::size_t n = shape_size(layout.entries[e].shape);
        for (std::size_t i = 0; i < n; ++i)
          grads[layout.entries[e].offset + i] = g.size() == n ? g.data[i] : 0.0;
      }
      opt.step(result.params, grads);
      epoch_loss += loss_v * static_cast<double>(idx.size());
      seen += idx.size();
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(seen));
  }
  return result;
}

Trajectory forecaster_rollout(const ForecasterSpec& spec, std::span<const double> params,
                              const Array& seed_window, std::size_t n_steps, double dt,
                              double t_start) {
  return rollout_with(
      [&spec, params](const Array& w) { return forecaster_forward(spec, params, w); }, seed_window,
      n_steps, dt, t_start);
}

void save_forecaster(const std::string& path, const ForecasterSpec& spec,
                     std::span<const double> params) {
  std::vector<std::pair<std::string, std::string>> header;
  header.emplace_back("model", to_string(spec.kind));
  header.emplace_back("window_len", std::to_string(spec.window_len));
  header.emplace_back("io_width", std::to_string(spec.io_width));
  header.emplace_back("hidden", std::to_string(spec.hidden));
  header.emplace_back("rnn_layers", std::to_string(spec.rnn_layers));
  std::ostringstream conv;
  for (std::size_t i = 0; i < spec.conv_layers.size(); ++i) {
    if (i) conv << ";";
    conv << spec.conv_layers[i].kernel << "," << spec.conv_layers[i].padding << ","
         << spec.conv_layers[i].stride;
  }
  header.emplace_back("conv_layers", conv.str());
  save_params(path, header, params);
}

std::pair<ForecasterSpec, std::vector<double>> load_forecaster(const std::string& path) {
  const ParamFile pf = load_params(path);
  auto need = [&pf, &path](const std::string& key) {
    const auto it = pf.header.find(key);
    if (it == pf.header.end())
      throw std::runtime_error("model file " + path + " is missing header key " + key);
    return it->second;
  };
  ForecasterSpec spec;
  spec.kind = model_kind_from_string(need("model"));
  spec.window_len = std::stoul(need("window_len"));
  spec.io_width = std::stoul(need("io_width"));
  spec.hidden = std::stoul(need("hidden"));
  spec.rnn_layers = std::stoul(need("rnn_layers"));
  spec.conv_layers.clear();
  std::istringstream conv(need("conv_layers"));
  std::string part;
  while (std::getline(conv, part, ';')) {
    ConvLayerCfg c;
    if (std::sscanf(part.c_str(), "%zu,%zu,%zu", &c.kernel, &c.padding, &c.stride) != 3)
      throw std::runtime_error("model file " + path + " has a malformed conv_layers header");
    spec.conv_layers.push_back(c);
  }
  const ParamLayout layout = forecaster_layout(spec);
  if (pf.values.size() != layout.total)
    throw std::runtime_error("model file " + path + " parameter count does not match its spec");
  return {spec, pf.values};
}

}  // namespace swarmsid
