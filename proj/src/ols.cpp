#include "swarmsid/ols.hpp"

#include <Eigen/Dense>

#include <fstream>
#include <sstream>

#include "swarmsid/rollout.hpp"
#include "swarmsid/serialize.hpp"

namespace swarmsid {

namespace {

using Mat = Eigen::MatrixXd;

// least squares with optional ridge; minimum-norm on rank deficiency
Mat solve_ls(const Mat& x, const Mat& y, double ridge, bool* deficient) {
  Mat xa = x;
  Mat ya = y;
  if (ridge > 0.0) {
    // augment with sqrt(ridge) * I rows
    xa.conservativeResize(x.rows() + x.cols(), Eigen::NoChange);
    xa.bottomRows(x.cols()) = std::sqrt(ridge) * Mat::Identity(x.cols(), x.cols());
    ya.conservativeResize(y.rows() + x.cols(), Eigen::NoChange);
    ya.bottomRows(x.cols()).setZero();
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(xa);
  if (cod.rank() < xa.cols() && deficient) *deficient = true;
  return cod.solve(ya);
}

void check_samples(const std::vector<WindowedSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("fit_ols: no samples");
  const auto& shape = samples.front().input.shape;
  for (const WindowedSample& s : samples)
    if (s.input.shape != shape || s.target.size() != shape[1])
      throw ShapeError("fit_ols: inconsistent sample shapes");
}

}  // namespace

std::vector<double> OlsModel::predict(const Array& window) const {
  const std::size_t width = 4 * n_agents;
  if (window.rank() != 2 || window.rows() != in_samples || window.cols() != width)
    throw ShapeError("ols predict: window shape " + window.shape_str() + " does not match model");
  std::vector<double> out(width, 0.0);
  if (!per_agent) {
    const std::size_t f = in_samples * width;
    for (std::size_t c = 0; c < width; ++c) {
      double acc = weights.at(f, c);  // bias row
      for (std::size_t r = 0; r < f; ++r) acc += window.data[r] * weights.at(r, c);
      out[c] = acc;
    }
  } else {
    const std::size_t fa = in_samples * 4;
    for (std::size_t agent = 0; agent < n_agents; ++agent) {
      const Array& w = agent_weights[agent];
      for (std::size_t c = 0; c < 4; ++c) {
        double acc = w.at(fa, c);
        for (std::size_t s = 0; s < in_samples; ++s)
          for (std::size_t k = 0; k < 4; ++k)
            acc += window.at(s, 4 * agent + k) * w.at(s * 4 + k, c);
        out[4 * agent + c] = acc;
      }
    }
  }
  return out;
}

OlsModel fit_ols(const std::vector<WindowedSample>& samples, double ridge, bool per_agent,
                 std::size_t horizon) {
  check_samples(samples);
  const std::size_t m = samples.front().input.rows();
  const std::size_t width = samples.front().input.cols();
  const std::size_t count = samples.size();

  OlsModel model;
  model.in_samples = m;
  model.horizon = horizon;
  model.n_agents = width / 4;
  model.per_agent = per_agent;

  if (!per_agent) {
    const std::size_t f = m * width;
    Mat x(count, f + 1), y(count, width);
    for (std::size_t s = 0; s < count; ++s) {
      for (std::size_t j = 0; j < f; ++j) x(static_cast<long>(s), static_cast<long>(j)) = samples[s].input.data[j];
      x(static_cast<long>(s), static_cast<long>(f)) = 1.0;
      for (std::size_t j = 0; j < width; ++j)
        y(static_cast<long>(s), static_cast<long>(j)) = samples[s].target.data[j];
    }
    const Mat w = solve_ls(x, y, ridge, &model.rank_deficient);
    model.weights = Array({f + 1, width});
    for (std::size_t r = 0; r < f + 1; ++r)
      for (std::size_t c = 0; c < width; ++c)
        model.weights.at(r, c) = w(static_cast<long>(r), static_cast<long>(c));
    return model;
  }

  const std::size_t fa = m * 4;
  model.agent_weights.resize(model.n_agents);
  for (std::size_t agent = 0; agent < model.n_agents; ++agent) {
    Mat x(count, fa + 1), y(count, 4);
    for (std::size_t s = 0; s < count; ++s) {
      for (std::size_t step = 0; step < m; ++step)
        for (std::size_t k = 0; k < 4; ++k)
          x(static_cast<long>(s), static_cast<long>(step * 4 + k)) =
              samples[s].input.at(step, 4 * agent + k);
      x(static_cast<long>(s), static_cast<long>(fa)) = 1.0;
      for (std::size_t k = 0; k < 4; ++k)
        y(static_cast<long>(s), static_cast<long>(k)) = samples[s].target.data[4 * agent + k];
    }
    const Mat w = solve_ls(x, y, ridge, &model.rank_deficient);
    Array aw({fa + 1, 4});
    for (std::size_t r = 0; r < fa + 1; ++r)
      for (std::size_t c = 0; c < 4; ++c) aw.at(r, c) = w(static_cast<long>(r), static_cast<long>(c));
    model.agent_weights[agent] = std::move(aw);
  }
  return model;
}

Trajectory ols_rollout(const OlsModel& model, const Array& seed_window, std::size_t n_steps,
                       double dt, double t_start) {
  if (model.horizon != 1)
    throw std::invalid_argument(
        "ols_rollout: autoregressive rollout requires horizon 1 (model predicts the n-th step "
        "ahead only)");
  return rollout_with([&model](const Array& w) { return model.predict(w); }, seed_window, n_steps,
                      dt, t_start);
}

void save_ols_csv(const OlsModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "m,n,N,per_agent,rank_deficient\n";
  out << model.in_samples << "," << model.horizon << "," << model.n_agents << ","
      << (model.per_agent ? 1 : 0) << "," << (model.rank_deficient ? 1 : 0) << "\n";
  auto dump = [&out](const Array& w) {
    for (std::size_t r = 0; r < w.rows(); ++r) {
      for (std::size_t c = 0; c < w.cols(); ++c) {
        if (c) out << ",";
        out << format_double(w.at(r, c));
      }
      out << "\n";
    }
  };
  if (!model.per_agent)
    dump(model.weights);
  else
    for (const Array& w : model.agent_weights) dump(w);
  if (!out) throw std::runtime_error("write failed: " + path);
}

OlsModel load_ols_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("m,n,N", 0) != 0)
    throw CsvParseError("bad OLS model header in " + path, 1, 0);
  if (!std::getline(in, line)) throw CsvParseError("missing OLS header row in " + path, 2, 0);
  std::istringstream hs(line);
  OlsModel model;
  char comma;
  int per_agent = 0, deficient = 0;
  hs >> model.in_samples >> comma >> model.horizon >> comma >> model.n_agents >> comma >>
      per_agent >> comma >> deficient;
  if (!hs) throw CsvParseError("bad OLS header row in " + path, 2, 0);
  model.per_agent = per_agent != 0;
  model.rank_deficient = deficient != 0;

  std::vector<std::vector<double>> rows;
  std::size_t rowno = 2;
  while (std::getline(in, line)) {
    ++rowno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      row.push_back(std::strtod(cell.c_str(), &end));
      if (end == cell.c_str() || *end != '\0')
        throw CsvParseError("non-numeric cell in " + path + " row " + std::to_string(rowno), rowno,
                            row.size());
    }
    rows.push_back(std::move(row));
  }
  const std::size_t width = 4 * model.n_agents;
  if (!model.per_agent) {
    const std::size_t f = model.in_samples * width;
    if (rows.size() != f + 1)
      throw CsvParseError("OLS weight row count mismatch in " + path, rowno, 0);
    model.weights = Array({f + 1, width});
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != width)
        throw CsvParseError("OLS weight column count mismatch in " + path, r + 3, 0);
      for (std::size_t c = 0; c < width; ++c) model.weights.at(r, c) = rows[r][c];
    }
  } else {
    const std::size_t fa = model.in_samples * 4;
    if (rows.size() != model.n_agents * (fa + 1))
      throw CsvParseError("OLS weight row count mismatch in " + path, rowno, 0);
    model.agent_weights.resize(model.n_agents);
    for (std::size_t agent = 0; agent < model.n_agents; ++agent) {
      Array w({fa + 1, 4});
      for (std::size_t r = 0; r <= fa; ++r) {
        const std::vector<double>& row = rows[agent * (fa + 1) + r];
        if (row.size() != 4)
          throw CsvParseError("OLS weight column count mismatch in " + path, 0, 0);
        for (std::size_t c = 0; c < 4; ++c) w.at(r, c) = row[c];
      }
      model.agent_weights[agent] = std::move(w);
    }
  }
  return model;
}

}  // namespace swarmsid
