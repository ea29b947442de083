// SPDX-License-Identifier: Apache-2.0
#include "wisac/config.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace wisac {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

void ScenarioConfig::apply_uniform_comm_weights() {
  weights_comm.assign(static_cast<size_t>(n_users), (1.0 - weight_sense) / n_users);
}

void ScenarioConfig::fill_derived() {
  if (clutter_gain_vars.empty())
    clutter_gain_vars.assign(static_cast<size_t>(n_clutters), target_gain_var);
  if (weights_comm.empty()) apply_uniform_comm_weights();
}

void ScenarioConfig::validate() const {
  require(n_tx >= 1, "n_tx: must be >= 1");
  require(n_rx >= 1, "n_rx: must be >= 1");
  require(n_users >= 1, "n_users: must be >= 1");
  require(n_ue_ant >= 1, "n_ue_ant: must be >= 1");
  require(n_sense_streams >= 1, "n_sense_streams: must be >= 1");
  require(n_paths >= 1, "n_paths: must be >= 1");
  require(n_clutters >= 0, "n_clutters: must be >= 0");

  require(noise_power_comm > 0.0, "noise_comm_dbm: noise power must be positive");
  require(noise_power_sense > 0.0, "noise_sense_dbm: noise power must be positive");
  require(path_var_los > 0.0, "path_los_dbm: variance must be positive");
  require(path_var_nlos > 0.0, "path_nlos_dbm: variance must be positive");
  require(target_gain_var > 0.0, "target_gain_dbm: variance must be positive");
  require(power_budget > 0.0, "snr_db: power budget must be positive");

  require(clutter_gain_vars.size() == static_cast<size_t>(n_clutters),
          "clutter_gain_dbm: expected " + std::to_string(n_clutters) + " entries, got " +
              std::to_string(clutter_gain_vars.size()));
  for (double v : clutter_gain_vars)
    require(v > 0.0, "clutter_gain_dbm: variances must be positive");

  require(weight_sense >= 0.0 && weight_sense < 1.0, "weight_sense: must lie in [0, 1)");
  require(weights_comm.size() == static_cast<size_t>(n_users),
          "weights_comm: expected " + std::to_string(n_users) + " entries, got " +
              std::to_string(weights_comm.size()));
  for (double w : weights_comm)
    require(w >= 0.0, "weights_comm: weights must be nonnegative");
  const double sum = std::accumulate(weights_comm.begin(), weights_comm.end(), 0.0);
  require(std::abs(sum - (1.0 - weight_sense)) <= 1e-9,
          "weights_comm: must sum to 1 - weight_sense");

  require(tol > 0.0, "tol: must be positive");
  require(max_iters >= 1, "max_iters: must be >= 1");
}

ScenarioConfig default_config() {
  ScenarioConfig cfg;
  cfg.fill_derived();
  cfg.validate();
  return cfg;
}

}  // namespace wisac
