// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wisac/montecarlo.hpp"

namespace wisac {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kOutDirEnvVar = "WISAC_OUT_DIR";

inline constexpr const char* kAggregateCsvHeader =
    "sweep_param,value,mean_cmi_per_ue,se_cmi,mean_smi,se_smi,mean_sc_rate,se_sc_rate,"
    "n_trials,n_failed,mean_iters";

/// Shortest decimal text that round-trips the exact double (locale-free).
std::string format_double(double v);

/// A fully resolved run configuration: typed structs plus the canonical
/// input-form JSON text (every key explicit) that reproduces them.
struct LoadedRun {
  ScenarioConfig scenario;
  SweepSpec sweep;
  std::string resolved_text;
};

/// Reads a JSON config (empty path or empty file = pure defaults), applies
/// `key=value` overrides (dotted paths, JSON-parsed values), resolves every
/// default and validates. A manifest file is accepted too: its embedded
/// config_input block is used. Throws ConfigError naming the offending key.
LoadedRun load_config(const std::string& path, const std::vector<std::string>& overrides);

/// Aggregate tables, one CSV per curve: the omega sweep yields a single
/// file; snr/tradeoff sweeps yield one file per fixed secondary value.
std::vector<std::pair<std::string, std::string>> render_aggregate_csvs(const SweepResult& r);

/// Line-delimited per-trial records (no timing fields; byte-reproducible).
std::string render_trials_jsonl(const SweepResult& r);

/// Per-iteration solver trace (iter, objective, weighted rate, lambda, power).
std::string render_trace_csv(const SolverState& st);

std::string render_manifest(const LoadedRun& run, const std::string& command, int workers,
                            const std::string& out_dir, const std::vector<std::string>& outputs);

/// Creates parent directories as needed.
void write_text_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace wisac
