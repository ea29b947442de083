// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wisac/solver.hpp"

namespace wisac {

/// Sweep grids and trial budget on top of a base scenario.
struct SweepSpec {
  std::vector<double> omega_values;
  std::vector<double> snr_values_db;
  int n_trials = 500;
  ScenarioConfig base_config;
  std::uint64_t master_seed = 1;
};

/// Outcome of one trial. A failed trial keeps its error text; it is excluded
/// from rate means but counted.
struct TrialRecord {
  int trial_idx = 0;
  bool failed = false;
  std::string error;
  RateReport report;
  int iterations = 0;
  bool converged = false;
  double lambda = 0.0;
  double power = 0.0;
  double seconds = 0.0;

  double cmi_per_ue() const;
  double sc_rate() const;  // cmi_per_ue + sense rate
};

/// Means and standard errors over the trials of one sweep point.
struct PointStats {
  double omega_tau = 0.0;
  double snr_db = 0.0;
  int n_trials = 0;
  int n_failed = 0;
  double mean_cmi_per_ue = 0.0, se_cmi_per_ue = 0.0;
  double mean_smi = 0.0, se_smi = 0.0;
  double mean_sc_rate = 0.0, se_sc_rate = 0.0;
  double mean_iters = 0.0;
  double nonconverged_frac = 0.0;
};

/// Aggregates over an omega x snr grid, row-major with snr varying fastest.
/// The omega sweep has a single snr column (the base config's budget).
struct SweepResult {
  std::string kind;  // "omega", "snr" or "tradeoff"
  std::vector<double> omega_values;
  std::vector<double> snr_values_db;
  std::vector<PointStats> points;                 // size = n_omega * n_snr
  std::vector<std::vector<TrialRecord>> trials;   // per point, in trial order

  const PointStats& at(size_t i_omega, size_t i_snr) const;
};

/// Samples the trial's channels, solves, and re-evaluates the final rates
/// from scratch (not from the solver trace). Exceptions become a failed
/// record, never a crash.
TrialRecord run_trial(const ScenarioConfig& cfg, int trial_idx);

/// Sample means / standard errors (n-1 denominator); throws SolverError when
/// every trial at the point failed.
PointStats aggregate(const std::vector<TrialRecord>& trials, double omega_tau, double snr_db);

/// Base config at one grid point: sensing weight replaced (uniform user
/// weights), power budget replaced when an SNR is given, seed = master seed.
ScenarioConfig point_config(const SweepSpec& spec, double omega_tau,
                            std::optional<double> snr_db);

SweepResult sweep_omega(const SweepSpec& spec, int workers = 1);
SweepResult sweep_snr(const SweepSpec& spec, int workers = 1);
SweepResult sweep_tradeoff(const SweepSpec& spec, int workers = 1);

}  // namespace wisac
