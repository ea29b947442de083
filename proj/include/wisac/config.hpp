// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "wisac/errors.hpp"

namespace wisac {

// Power quantities are kept linear (milliwatt-referenced) internally;
// config files speak dBm / dB and are converted on load.
inline double dbm_to_linear(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double snr_db_to_power(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

enum class InitMode { kMatched, kRandom };

enum class ConvergenceMetric { kRateAbs, kRateRel, kObjectiveAbs, kObjectiveRel };

/// Physical and algorithmic parameters for one scenario.
struct ScenarioConfig {
  int n_tx = 16;             // transmit antennas
  int n_rx = 4;              // sensing receive antennas
  int n_users = 3;           // K
  int n_ue_ant = 4;          // antennas (= streams) per UE
  int n_sense_streams = 1;   // S
  int n_paths = 10;          // multipath components per UE channel
  int n_clutters = 3;        // clutter patches

  double noise_power_comm = 1e3;   // sigma_c^2, linear (30 dBm)
  double noise_power_sense = 1e3;  // sigma_s^2, linear (30 dBm)
  double path_var_los = 1e3;       // LOS path-gain variance (30 dBm)
  double path_var_nlos = 1e2;      // NLOS path-gain variance (20 dBm)
  double target_gain_var = 1e3;    // target channel-gain variance (30 dBm)
  std::vector<double> clutter_gain_vars;  // per patch; empty = all equal to target_gain_var

  double power_budget = snr_db_to_power(25.0);  // P0
  double weight_sense = 0.5;                    // omega_tau in [0, 1)
  std::vector<double> weights_comm;             // per-user; empty = uniform split of 1 - weight_sense

  // Stop when the weighted sum rate moves by less than tol between
  // iterations, measured per conv_metric (relative by default: the absolute
  // variant demands ~1e-4 relative precision on ~10-bit rates and routinely
  // outruns the 50-iteration cap).
  double tol = 1e-3;
  int max_iters = 50;
  std::uint64_t seed = 1;
  InitMode init = InitMode::kMatched;
  ConvergenceMetric conv_metric = ConvergenceMetric::kRateRel;

  /// Fills clutter_gain_vars / weights_comm when left empty.
  void fill_derived();

  /// Uniform per-user weights (1 - weight_sense) / n_users.
  void apply_uniform_comm_weights();

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Scenario with derived lists resolved; usable without a config file.
ScenarioConfig default_config();

}  // namespace wisac
