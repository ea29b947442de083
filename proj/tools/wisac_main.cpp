// SPDX-License-Identifier: Apache-2.0
//
// wisac: WMMSE beamforming for integrated sensing and communication.
//
// Commands:
//   solve            one scenario, one trial; prints the rate report
//   sweep omega      sensing-weight sweep at the configured SNR
//   sweep snr        SNR sweep, one curve per sensing weight
//   sweep tradeoff   sensing-weight sweep repeated at each SNR
//   check            invariant/oracle self-test on a small scenario

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wisac/io.hpp"
#include "wisac/linalg.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitPartial = 3;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  int workers = 0;  // 0 = machine parallelism
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file (or a manifest.json)");
  cmd->add_option("--set", args.overrides, "Override KEY=VALUE (repeatable, dotted paths)")
      ->type_size(1);
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--workers", args.workers, "Parallel trial workers (0 = all cores)");
}

std::string resolve_out_dir(const CommonArgs& args) {
  if (!args.out_dir.empty()) return args.out_dir;
  if (const char* env = std::getenv(wisac::kOutDirEnvVar); env && *env) return env;
  return "out";
}

wisac::LoadedRun load(const CommonArgs& args, std::optional<std::uint64_t> seed,
                      std::optional<int> trials) {
  std::vector<std::string> overrides = args.overrides;
  if (seed) overrides.push_back("seed=" + std::to_string(*seed));
  if (trials) overrides.push_back("sweep.n_trials=" + std::to_string(*trials));
  return wisac::load_config(args.config_path, overrides);
}

int cmd_solve(const CommonArgs& args, std::optional<std::uint64_t> seed) {
  const wisac::LoadedRun run = load(args, seed, std::nullopt);
  const std::string out_dir = resolve_out_dir(args);

  const wisac::ChannelSet ch = wisac::sample_scenario(run.scenario, 0);
  const wisac::SolverState st = wisac::solve(ch, run.scenario);
  const wisac::RateReport report = wisac::weighted_sum_rate(ch, st.precoder, run.scenario);

  for (int it = 1; it <= st.iterations; ++it) {
    const size_t i = static_cast<size_t>(it);
    std::cout << "iter " << it << ": rate " << wisac::format_double(st.rate_trace[i])
              << "  objective " << wisac::format_double(st.objective_trace[i - 1]) << "  lambda "
              << wisac::format_double(st.lambda_trace[i - 1]) << "\n";
  }
  std::cout << "converged: " << (st.converged ? "yes" : "no") << " after " << st.iterations
            << " iterations (" << wisac::format_double(st.solve_seconds * 1e3) << " ms, "
            << wisac::format_double(st.solve_seconds * 1e3 / st.iterations) << " ms/iter)\n";
  for (size_t k = 0; k < report.comm_rates.size(); ++k)
    std::cout << "cmi_rate[" << k << "]: " << wisac::format_double(report.comm_rates[k])
              << " bits\n";
  std::cout << "smi_rate: " << wisac::format_double(report.sense_rate) << " bits\n"
            << "weighted_sum_rate: " << wisac::format_double(report.weighted_sum) << " bits\n"
            << "lambda: " << wisac::format_double(st.lambda) << "\n"
            << "power: " << wisac::format_double(wisac::total_power(st.precoder)) << " / "
            << wisac::format_double(run.scenario.power_budget) << "\n";

  wisac::write_text_file(out_dir + "/trace.csv", wisac::render_trace_csv(st));
  wisac::write_text_file(out_dir + "/manifest.json",
                         wisac::render_manifest(run, "solve", 1, out_dir, {"trace.csv"}));
  std::cout << "wrote " << out_dir << "/trace.csv\n";
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const std::string& which, std::optional<std::uint64_t> seed,
              std::optional<int> trials) {
  wisac::LoadedRun run = load(args, seed, trials);
  const std::string out_dir = resolve_out_dir(args);

  wisac::SweepResult result;
  if (which == "omega")
    result = wisac::sweep_omega(run.sweep, args.workers);
  else if (which == "snr")
    result = wisac::sweep_snr(run.sweep, args.workers);
  else
    result = wisac::sweep_tradeoff(run.sweep, args.workers);

  std::vector<std::string> outputs;
  for (auto& [name, content] : wisac::render_aggregate_csvs(result)) {
    wisac::write_text_file(out_dir + "/" + name, content);
    outputs.push_back(name);
  }
  const std::string jsonl_name = "trials_" + result.kind + ".jsonl";
  wisac::write_text_file(out_dir + "/" + jsonl_name, wisac::render_trials_jsonl(result));
  outputs.push_back(jsonl_name);
  wisac::write_text_file(
      out_dir + "/manifest.json",
      wisac::render_manifest(run, "sweep " + which, args.workers, out_dir, outputs));

  int n_failed = 0;
  double nonconverged = 0.0;
  for (const wisac::PointStats& p : result.points) {
    n_failed += p.n_failed;
    nonconverged = std::max(nonconverged, p.nonconverged_frac);
  }
  std::cout << "sweep " << which << ": " << result.points.size() << " points x "
            << run.sweep.n_trials << " trials, " << n_failed << " failed trials, worst point "
            << wisac::format_double(nonconverged * 100.0) << "% non-converged\n";
  for (const std::string& name : outputs) std::cout << "wrote " << out_dir << "/" << name << "\n";
  return n_failed == 0 ? kExitOk : kExitPartial;
}

bool check(const char* label, bool ok, std::string detail = "") {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << label;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n";
  return ok;
}

int cmd_check() {
  using namespace wisac;
  ScenarioConfig cfg;
  cfg.n_tx = 8;
  cfg.n_rx = 4;
  cfg.n_users = 2;
  cfg.n_ue_ant = 2;
  cfg.n_paths = 4;
  cfg.n_clutters = 2;
  cfg.power_budget = snr_db_to_power(20.0);
  cfg.tol = 1e-6;
  cfg.max_iters = 500;
  cfg.seed = 99;
  cfg.fill_derived();
  cfg.validate();

  bool all = true;

  double worst_norm = 0.0;
  for (double angle : {-1.2, -0.4, 0.0, 0.7, 1.5})
    worst_norm = std::max(worst_norm,
                          std::abs(steering_vector(angle, 7).squaredNorm() - 1.0));
  all &= check("steering vectors unit norm", worst_norm < 1e-12,
               "max deviation " + format_double(worst_norm));

  const ChannelSet ch = sample_scenario(cfg, 0);
  const ChannelSet ch2 = sample_scenario(cfg, 0);
  bool identical = ch.sense == ch2.sense && ch.comm.size() == ch2.comm.size();
  for (size_t k = 0; identical && k < ch.comm.size(); ++k)
    identical = ch.comm[k] == ch2.comm[k];
  all &= check("channel sampling deterministic", identical);

  Eigen::JacobiSVD<CMat> svd(ch.sense);
  all &= check("target channel rank one",
               svd.singularValues()(1) < 1e-10 * svd.singularValues()(0));

  const SolverState st = solve(ch, cfg);
  all &= check("solver converged", st.converged,
               std::to_string(st.iterations) + " iterations");

  double worst_step = 0.0;
  for (size_t i = 1; i < st.rate_trace.size(); ++i)
    worst_step = std::max(worst_step, st.rate_trace[i - 1] - st.rate_trace[i]);
  all &= check("weighted sum rate non-decreasing", worst_step < 1e-9,
               "worst step " + format_double(worst_step));

  double worst_power = 0.0;
  for (double p : st.power_trace) worst_power = std::max(worst_power, p / cfg.power_budget - 1.0);
  all &= check("power budget respected", worst_power <= 1e-6,
               "worst relative excess " + format_double(worst_power));

  const RateReport report = weighted_sum_rate(ch, st.precoder, cfg);
  double worst_identity = std::abs(report.sense_rate + log2det_pd(st.mse.sensing));
  for (size_t k = 0; k < st.mse.per_user.size(); ++k)
    worst_identity = std::max(
        worst_identity, std::abs(report.comm_rates[k] + log2det_pd(st.mse.per_user[k])));
  all &= check("rate equals -log2 det(MSE)", worst_identity < 1e-8,
               "max deviation " + format_double(worst_identity));

  // Gradient oracle away from stationarity (relative error is meaningless
  // when the gradient itself is ~0).
  SolverState probe;
  {
    TrialRng rng(cfg.seed, 0x6772616442ULL);
    probe.precoder = random_init(ch, cfg, rng);
    auto [pb, pcov] = update_combiners(ch, probe.precoder, cfg);
    (void)pcov;
    probe.combiners = std::move(pb);
    probe.mse = mse_matrices(ch, probe.precoder, probe.combiners);
    probe.weights = update_weights(probe.mse);
    probe.lambda = 0.5;
  }
  double worst_grad = 0.0;
  for (int target : {0, 1, kSensingTarget})
    worst_grad = std::max(worst_grad, gradient_check(ch, probe, cfg, target));
  all &= check("closed-form gradient matches finite differences", worst_grad < 1e-4,
               "max relative error " + format_double(worst_grad));

  ScenarioConfig one_step = cfg;
  one_step.max_iters = 1;
  const SolverState again = solve(ch, one_step, st.precoder);
  const double drift = std::abs(again.rate_trace[1] - again.rate_trace[0]) /
                       std::max(1e-12, std::abs(again.rate_trace[0]));
  all &= check("converged point is a fixed point", drift < cfg.tol,
               "relative rate drift " + format_double(drift));

  std::cout << (all ? "CHECK OK\n" : "CHECK FAILED\n");
  return all ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WMMSE beamforming for integrated sensing and communication"};
  app.require_subcommand(1);

  CommonArgs solve_args, sweep_args;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string which;

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve one scenario and print the rates");
  add_common(solve_cmd, solve_args);
  solve_cmd->add_option("--seed", seed, "Master seed");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo sweep");
  sweep_cmd->add_option("which", which, "omega | snr | tradeoff")
      ->required()
      ->check(CLI::IsMember({"omega", "snr", "tradeoff"}));
  add_common(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--seed", seed, "Master seed");
  sweep_cmd->add_option("--trials", trials, "Trials per sweep point");

  CLI::App* check_cmd = app.add_subcommand("check", "Run the invariant self-test");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(solve_args, seed);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, which, seed, trials);
    if (check_cmd->parsed()) return cmd_check();
  } catch (const wisac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitConfig;
}
