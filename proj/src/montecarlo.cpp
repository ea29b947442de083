// SPDX-License-Identifier: Apache-2.0
#include "wisac/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace wisac {

namespace {

constexpr std::uint64_t kRandomInitTag = 0x8000000000000000ULL;

double sample_mean(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

double standard_error(const std::vector<double>& xs, double mean) {
  const size_t n = xs.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

double nominal_snr_db(const ScenarioConfig& cfg) {
  return 10.0 * std::log10(cfg.power_budget);
}

SweepResult run_grid(const SweepSpec& spec, const std::vector<double>& omegas,
                     const std::vector<std::optional<double>>& snrs, const char* kind,
                     int workers) {
  if (spec.n_trials < 1) throw ConfigError("sweep.n_trials: must be >= 1");
  if (omegas.empty()) throw ConfigError("sweep.omega_values: must not be empty");
  if (snrs.empty()) throw ConfigError("sweep.snr_values_db: must not be empty");

  SweepResult result;
  result.kind = kind;
  result.omega_values = omegas;
  for (const auto& snr : snrs)
    result.snr_values_db.push_back(snr ? *snr : nominal_snr_db(spec.base_config));

  std::vector<ScenarioConfig> configs;
  configs.reserve(omegas.size() * snrs.size());
  for (double omega : omegas)
    for (const auto& snr : snrs) configs.push_back(point_config(spec, omega, snr));

  const size_t n_points = configs.size();
  const size_t n_trials = static_cast<size_t>(spec.n_trials);
  std::vector<TrialRecord> slots(n_points * n_trials);

  std::atomic<size_t> next{0};
  const auto work = [&]() {
    for (size_t job = next.fetch_add(1); job < slots.size(); job = next.fetch_add(1)) {
      const size_t point = job / n_trials;
      const int trial = static_cast<int>(job % n_trials);
      slots[job] = run_trial(configs[point], trial);
    }
  };

  int n_workers = workers > 0 ? workers
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_workers = static_cast<int>(std::min<size_t>(static_cast<size_t>(n_workers), slots.size()));
  if (n_workers <= 1)
    work();
  else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_workers));
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  // Deterministic reduction in (point, trial) order regardless of who ran what.
  result.points.reserve(n_points);
  result.trials.reserve(n_points);
  for (size_t p = 0; p < n_points; ++p) {
    std::vector<TrialRecord> rows(slots.begin() + static_cast<std::ptrdiff_t>(p * n_trials),
                                  slots.begin() + static_cast<std::ptrdiff_t>((p + 1) * n_trials));
    result.points.push_back(
        aggregate(rows, configs[p].weight_sense, nominal_snr_db(configs[p])));
    result.trials.push_back(std::move(rows));
  }
  return result;
}

}  // namespace

double TrialRecord::cmi_per_ue() const {
  if (report.comm_rates.empty()) return 0.0;
  double acc = 0.0;
  for (double r : report.comm_rates) acc += r;
  return acc / static_cast<double>(report.comm_rates.size());
}

double TrialRecord::sc_rate() const { return cmi_per_ue() + report.sense_rate; }

const PointStats& SweepResult::at(size_t i_omega, size_t i_snr) const {
  return points.at(i_omega * snr_values_db.size() + i_snr);
}

TrialRecord run_trial(const ScenarioConfig& cfg, int trial_idx) {
  TrialRecord rec;
  rec.trial_idx = trial_idx;
  try {
    const ChannelSet ch = sample_scenario(cfg, trial_idx);
    std::optional<Precoder> init;
    if (cfg.init == InitMode::kRandom) {
      TrialRng rng(cfg.seed, kRandomInitTag | static_cast<std::uint64_t>(trial_idx));
      init = random_init(ch, cfg, rng);
    }
    const SolverState st = solve(ch, cfg, init);
    rec.report = weighted_sum_rate(ch, st.precoder, cfg);
    rec.iterations = st.iterations;
    rec.converged = st.converged;
    rec.lambda = st.lambda;
    rec.power = total_power(st.precoder);
    rec.seconds = st.solve_seconds;
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

PointStats aggregate(const std::vector<TrialRecord>& trials, double omega_tau, double snr_db) {
  PointStats s;
  s.omega_tau = omega_tau;
  s.snr_db = snr_db;
  s.n_trials = static_cast<int>(trials.size());

  std::vector<double> cmi, smi, sc;
  double iter_acc = 0.0;
  int n_nonconverged = 0;
  for (const TrialRecord& t : trials) {
    if (t.failed) {
      ++s.n_failed;
      continue;
    }
    cmi.push_back(t.cmi_per_ue());
    smi.push_back(t.report.sense_rate);
    sc.push_back(t.sc_rate());
    iter_acc += static_cast<double>(t.iterations);
    if (!t.converged) ++n_nonconverged;
  }
  if (cmi.empty()) {
    std::ostringstream msg;
    msg << "aggregate: all " << trials.size() << " trials failed at omega_tau=" << omega_tau
        << ", snr_db=" << snr_db;
    if (!trials.empty()) msg << " (first error: " << trials.front().error << ")";
    throw SolverError(msg.str());
  }

  const double n_ok = static_cast<double>(cmi.size());
  s.mean_cmi_per_ue = sample_mean(cmi);
  s.se_cmi_per_ue = standard_error(cmi, s.mean_cmi_per_ue);
  s.mean_smi = sample_mean(smi);
  s.se_smi = standard_error(smi, s.mean_smi);
  s.mean_sc_rate = sample_mean(sc);
  s.se_sc_rate = standard_error(sc, s.mean_sc_rate);
  s.mean_iters = iter_acc / n_ok;
  s.nonconverged_frac = static_cast<double>(n_nonconverged) / n_ok;
  return s;
}

ScenarioConfig point_config(const SweepSpec& spec, double omega_tau,
                            std::optional<double> snr_db) {
  ScenarioConfig cfg = spec.base_config;
  cfg.seed = spec.master_seed;
  cfg.weight_sense = omega_tau;
  cfg.apply_uniform_comm_weights();
  if (snr_db) cfg.power_budget = snr_db_to_power(*snr_db);
  cfg.validate();
  return cfg;
}

SweepResult sweep_omega(const SweepSpec& spec, int workers) {
  return run_grid(spec, spec.omega_values, {std::nullopt}, "omega", workers);
}

SweepResult sweep_snr(const SweepSpec& spec, int workers) {
  std::vector<std::optional<double>> snrs(spec.snr_values_db.begin(), spec.snr_values_db.end());
  return run_grid(spec, spec.omega_values, snrs, "snr", workers);
}

SweepResult sweep_tradeoff(const SweepSpec& spec, int workers) {
  std::vector<std::optional<double>> snrs(spec.snr_values_db.begin(), spec.snr_values_db.end());
  return run_grid(spec, spec.omega_values, snrs, "tradeoff", workers);
}

}  // namespace wisac
