#pragma once

#include <string>

#include "swarmsid/dataset.hpp"

namespace swarmsid {

/// Linear sliding-window forecaster fit by least squares. Joint mode learns
/// one (m*4N + 1) x 4N weight matrix (bias row last) over the flattened
/// window; per-agent mode fits N independent (m*4 + 1) x 4 regressions.
struct OlsModel {
  Array weights;                    // joint mode
  std::vector<Array> agent_weights; // per-agent mode
  std::size_t in_samples = 10;      // m
  std::size_t horizon = 1;          // n
  std::size_t n_agents = 0;
  bool per_agent = false;
  bool rank_deficient = false;      // minimum-norm solution was selected

  std::vector<double> predict(const Array& window) const;  // window: (m, 4N)
};

/// Minimizes sum ||W^T x - y||^2 + ridge ||W||^2 via a rank-revealing
/// orthogonal factorization. Underdetermined systems without ridge fall back
/// to the minimum-norm solution and set rank_deficient.
OlsModel fit_ols(const std::vector<WindowedSample>& samples, double ridge = 0.0,
                 bool per_agent = false, std::size_t horizon = 1);

/// Autoregressive rollout: predict, shift the window to include the
/// prediction, repeat. Only horizon 1 can be iterated this way.
Trajectory ols_rollout(const OlsModel& model, const Array& seed_window, std::size_t n_steps,
                       double dt, double t_start);

/// CSV with an m,n,N header row.
void save_ols_csv(const OlsModel& model, const std::string& path);
OlsModel load_ols_csv(const std::string& path);

}  // namespace swarmsid
