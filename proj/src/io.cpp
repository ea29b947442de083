// SPDX-License-Identifier: Apache-2.0
#include "wisac/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wisac {

namespace {

using nlohmann::json;

const std::set<std::string> kScenarioKeys = {
    "n_tx",           "n_rx",           "n_users",         "n_ue_ant",
    "n_sense_streams", "n_paths",        "n_clutters",      "noise_comm_dbm",
    "noise_sense_dbm", "path_los_dbm",   "path_nlos_dbm",   "target_gain_dbm",
    "clutter_gain_dbm", "snr_db",        "weight_sense",    "weights_comm",
    "tol",            "max_iters",      "seed",            "init",
    "conv_metric",    "sweep"};

const std::set<std::string> kSweepKeys = {"omega_values", "snr_values_db", "n_trials"};

json default_input() {
  json j;
  j["n_tx"] = 16;
  j["n_rx"] = 4;
  j["n_users"] = 3;
  j["n_ue_ant"] = 4;
  j["n_sense_streams"] = 1;
  j["n_paths"] = 10;
  j["n_clutters"] = 3;
  j["noise_comm_dbm"] = 30.0;
  j["noise_sense_dbm"] = 30.0;
  j["path_los_dbm"] = 30.0;
  j["path_nlos_dbm"] = 20.0;
  j["target_gain_dbm"] = 30.0;
  j["snr_db"] = 25.0;
  j["weight_sense"] = 0.5;
  j["tol"] = 1e-3;
  j["max_iters"] = 50;
  j["seed"] = 1;
  j["init"] = "matched";
  j["conv_metric"] = "rate_rel";
  j["sweep"]["omega_values"] = {0.0, 0.25, 0.5, 0.75, 0.99};
  j["sweep"]["snr_values_db"] = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
  j["sweep"]["n_trials"] = 500;
  return j;
}

void reject_unknown_keys(const json& doc) {
  for (const auto& [key, value] : doc.items()) {
    if (!kScenarioKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
    if (key == "sweep") {
      if (!value.is_object()) throw ConfigError("sweep: must be an object");
      for (const auto& [skey, sval] : value.items()) {
        (void)sval;
        if (!kSweepKeys.count(skey)) throw ConfigError("unknown config key 'sweep." + skey + "'");
      }
    }
  }
}

void merge_into(json& base, const json& update) {
  for (const auto& [key, value] : update.items()) {
    if (key == "sweep" && value.is_object() && base.contains("sweep"))
      for (const auto& [skey, sval] : value.items()) base["sweep"][skey] = sval;
    else
      base[key] = value;
  }
}

void apply_override(json& doc, const std::string& kv) {
  const size_t eq = kv.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + kv + "': expected KEY=VALUE");
  const std::string path = kv.substr(0, eq);
  const std::string text = kv.substr(eq + 1);

  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;  // bare strings need no quotes
  }

  json* at = &doc;
  size_t start = 0;
  while (true) {
    const size_t dot = path.find('.', start);
    const std::string part = path.substr(start, dot - start);
    if (part.empty()) throw ConfigError("override '" + kv + "': empty key segment");
    if (dot == std::string::npos) {
      (*at)[part] = value;
      break;
    }
    at = &(*at)[part];
    start = dot + 1;
  }
}

template <typename T>
T fetch(const json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key + ": wrong type or missing");
  }
}

LoadedRun resolve(json doc) {
  reject_unknown_keys(doc);

  // Derived defaults become explicit so the resolved text is self-contained.
  if (!doc.contains("clutter_gain_dbm")) {
    const int n_clutters = fetch<int>(doc, "n_clutters");
    doc["clutter_gain_dbm"] =
        std::vector<double>(static_cast<size_t>(std::max(0, n_clutters)),
                            fetch<double>(doc, "target_gain_dbm"));
  }
  if (!doc.contains("weights_comm")) {
    const int n_users = fetch<int>(doc, "n_users");
    const double ws = fetch<double>(doc, "weight_sense");
    doc["weights_comm"] =
        std::vector<double>(static_cast<size_t>(std::max(1, n_users)), (1.0 - ws) / n_users);
  }

  LoadedRun run;
  ScenarioConfig& cfg = run.scenario;
  cfg.n_tx = fetch<int>(doc, "n_tx");
  cfg.n_rx = fetch<int>(doc, "n_rx");
  cfg.n_users = fetch<int>(doc, "n_users");
  cfg.n_ue_ant = fetch<int>(doc, "n_ue_ant");
  cfg.n_sense_streams = fetch<int>(doc, "n_sense_streams");
  cfg.n_paths = fetch<int>(doc, "n_paths");
  cfg.n_clutters = fetch<int>(doc, "n_clutters");
  cfg.noise_power_comm = dbm_to_linear(fetch<double>(doc, "noise_comm_dbm"));
  cfg.noise_power_sense = dbm_to_linear(fetch<double>(doc, "noise_sense_dbm"));
  cfg.path_var_los = dbm_to_linear(fetch<double>(doc, "path_los_dbm"));
  cfg.path_var_nlos = dbm_to_linear(fetch<double>(doc, "path_nlos_dbm"));
  cfg.target_gain_var = dbm_to_linear(fetch<double>(doc, "target_gain_dbm"));
  cfg.clutter_gain_vars.clear();
  for (double v : fetch<std::vector<double>>(doc, "clutter_gain_dbm"))
    cfg.clutter_gain_vars.push_back(dbm_to_linear(v));
  cfg.power_budget = snr_db_to_power(fetch<double>(doc, "snr_db"));
  cfg.weight_sense = fetch<double>(doc, "weight_sense");
  cfg.weights_comm = fetch<std::vector<double>>(doc, "weights_comm");
  cfg.tol = fetch<double>(doc, "tol");
  cfg.max_iters = fetch<int>(doc, "max_iters");
  cfg.seed = fetch<std::uint64_t>(doc, "seed");

  const std::string init = fetch<std::string>(doc, "init");
  if (init == "matched")
    cfg.init = InitMode::kMatched;
  else if (init == "random")
    cfg.init = InitMode::kRandom;
  else
    throw ConfigError("init: expected 'matched' or 'random', got '" + init + "'");

  const std::string metric = fetch<std::string>(doc, "conv_metric");
  if (metric == "rate_abs")
    cfg.conv_metric = ConvergenceMetric::kRateAbs;
  else if (metric == "rate_rel")
    cfg.conv_metric = ConvergenceMetric::kRateRel;
  else if (metric == "objective_abs")
    cfg.conv_metric = ConvergenceMetric::kObjectiveAbs;
  else if (metric == "objective_rel")
    cfg.conv_metric = ConvergenceMetric::kObjectiveRel;
  else
    throw ConfigError("conv_metric: unknown value '" + metric + "'");

  cfg.validate();

  SweepSpec& sweep = run.sweep;
  sweep.base_config = cfg;
  sweep.master_seed = cfg.seed;
  sweep.omega_values = fetch<std::vector<double>>(doc["sweep"], "omega_values");
  sweep.snr_values_db = fetch<std::vector<double>>(doc["sweep"], "snr_values_db");
  sweep.n_trials = fetch<int>(doc["sweep"], "n_trials");
  if (sweep.n_trials < 1) throw ConfigError("sweep.n_trials: must be >= 1");
  for (double w : sweep.omega_values)
    if (!(w >= 0.0 && w < 1.0)) throw ConfigError("sweep.omega_values: values must lie in [0, 1)");

  run.resolved_text = doc.dump(2) + "\n";
  return run;
}

std::string csv_int(long long v) { return std::to_string(v); }

void append_stats_row(std::string& out, const char* param, double value, const PointStats& p) {
  out += param;
  out += ',';
  out += format_double(value);
  out += ',';
  out += format_double(p.mean_cmi_per_ue);
  out += ',';
  out += format_double(p.se_cmi_per_ue);
  out += ',';
  out += format_double(p.mean_smi);
  out += ',';
  out += format_double(p.se_smi);
  out += ',';
  out += format_double(p.mean_sc_rate);
  out += ',';
  out += format_double(p.se_sc_rate);
  out += ',';
  out += csv_int(p.n_trials);
  out += ',';
  out += csv_int(p.n_failed);
  out += ',';
  out += format_double(p.mean_iters);
  out += '\n';
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

LoadedRun load_config(const std::string& path, const std::vector<std::string>& overrides) {
  json doc = default_input();
  if (!path.empty()) {
    const std::string text = read_text_file(path);
    if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
      json file;
      try {
        file = json::parse(text);
      } catch (const json::parse_error& e) {
        throw ConfigError("failed to parse '" + path + "': " + e.what());
      }
      if (file.contains("config_input")) file = file["config_input"];  // manifest reuse
      if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
      reject_unknown_keys(file);
      merge_into(doc, file);
    }
  }
  for (const std::string& kv : overrides) apply_override(doc, kv);
  return resolve(std::move(doc));
}

std::vector<std::pair<std::string, std::string>> render_aggregate_csvs(const SweepResult& r) {
  std::vector<std::pair<std::string, std::string>> files;
  const std::string header = std::string(kAggregateCsvHeader) + "\n";

  if (r.kind == "omega") {
    std::string body = header;
    for (size_t i = 0; i < r.omega_values.size(); ++i)
      append_stats_row(body, "omega_tau", r.omega_values[i], r.at(i, 0));
    files.emplace_back("aggregate_omega.csv", std::move(body));
  } else if (r.kind == "snr") {
    for (size_t i = 0; i < r.omega_values.size(); ++i) {
      std::string body = header;
      for (size_t j = 0; j < r.snr_values_db.size(); ++j)
        append_stats_row(body, "snr_db", r.snr_values_db[j], r.at(i, j));
      files.emplace_back("aggregate_snr_omega" + format_double(r.omega_values[i]) + ".csv",
                         std::move(body));
    }
  } else if (r.kind == "tradeoff") {
    for (size_t j = 0; j < r.snr_values_db.size(); ++j) {
      std::string body = header;
      for (size_t i = 0; i < r.omega_values.size(); ++i)
        append_stats_row(body, "omega_tau", r.omega_values[i], r.at(i, j));
      files.emplace_back("aggregate_tradeoff_snr" + format_double(r.snr_values_db[j]) + ".csv",
                         std::move(body));
    }
  } else {
    throw SolverError("render_aggregate_csvs: unknown sweep kind '" + r.kind + "'");
  }
  return files;
}

std::string render_trials_jsonl(const SweepResult& r) {
  std::string out;
  for (size_t p = 0; p < r.trials.size(); ++p) {
    const PointStats& stats = r.points[p];
    for (const TrialRecord& t : r.trials[p]) {
      json row;
      row["kind"] = r.kind;
      row["omega_tau"] = stats.omega_tau;
      row["snr_db"] = stats.snr_db;
      row["trial"] = t.trial_idx;
      row["failed"] = t.failed;
      if (t.failed) {
        row["error"] = t.error;
      } else {
        row["comm_rates"] = t.report.comm_rates;
        row["sense_rate"] = t.report.sense_rate;
        row["weighted_sum"] = t.report.weighted_sum;
        row["cmi_per_ue"] = t.cmi_per_ue();
        row["sc_rate"] = t.sc_rate();
        row["iterations"] = t.iterations;
        row["converged"] = t.converged;
        row["lambda"] = t.lambda;
        row["power"] = t.power;
      }
      out += row.dump();
      out += '\n';
    }
  }
  return out;
}

std::string render_trace_csv(const SolverState& st) {
  std::string out = "iter,objective,weighted_rate,lambda,power\n";
  out += "0,nan," + format_double(st.rate_trace.at(0)) + ",nan,nan\n";
  for (int it = 1; it <= st.iterations; ++it) {
    const size_t i = static_cast<size_t>(it);
    out += csv_int(it) + ',' + format_double(st.objective_trace.at(i - 1)) + ',' +
           format_double(st.rate_trace.at(i)) + ',' + format_double(st.lambda_trace.at(i - 1)) +
           ',' + format_double(st.power_trace.at(i - 1)) + '\n';
  }
  return out;
}

std::string render_manifest(const LoadedRun& run, const std::string& command, int workers,
                            const std::string& out_dir, const std::vector<std::string>& outputs) {
  json m;
  m["tool"] = "wisac";
  m["version"] = kToolVersion;
  m["csv_schema_version"] = kCsvSchemaVersion;
  m["command"] = command;
  m["workers"] = workers;
  m["out_dir"] = out_dir;
  m["master_seed"] = run.sweep.master_seed;
  m["outputs"] = outputs;

  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["timestamp"] = stamp;

  m["config_input"] = json::parse(run.resolved_text);
  return m.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace wisac
