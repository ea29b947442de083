// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "support/instances.hpp"
#include "wisac/io.hpp"

using namespace wisac;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("wisac_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << text;
  return p.string();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WISAC_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("empty config file yields the stock defaults") {
  const fs::path dir = temp_dir("defaults");
  const std::string path = write_config(dir, "empty.json", "");
  const LoadedRun run = load_config(path, {});

  CHECK(run.scenario.n_tx == 16);
  CHECK(run.scenario.n_rx == 4);
  CHECK(run.scenario.n_users == 3);
  CHECK(run.scenario.n_ue_ant == 4);
  CHECK(run.scenario.n_sense_streams == 1);
  CHECK(run.scenario.n_paths == 10);
  CHECK(run.scenario.n_clutters == 3);
  CHECK(run.scenario.noise_power_comm == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(run.scenario.path_var_los == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(run.scenario.path_var_nlos == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(run.scenario.power_budget == doctest::Approx(std::pow(10.0, 2.5)).epsilon(1e-15));
  CHECK(run.scenario.tol == 1e-3);
  CHECK(run.scenario.max_iters == 50);
  CHECK(run.scenario.clutter_gain_vars.size() == 3);
  for (double v : run.scenario.clutter_gain_vars) CHECK(v == doctest::Approx(1000.0));
  // default clutter variances average exactly to the target variance
  CHECK(run.sweep.n_trials == 500);
  CHECK(run.sweep.omega_values.size() == 5);
}

TEST_CASE("overrides: uniform weight split and validation failures") {
  SUBCASE("weight_sense=0.5 splits the remainder evenly") {
    const LoadedRun run = load_config("", {"weight_sense=0.5"});
    REQUIRE(run.scenario.weights_comm.size() == 3);
    for (double w : run.scenario.weights_comm)
      CHECK(w == doctest::Approx(0.5 / 3.0).epsilon(1e-15));
  }

  SUBCASE("weight_sense=1.0 is out of domain") {
    CHECK_THROWS_WITH_AS(load_config("", {"weight_sense=1.0"}),
                         doctest::Contains("weight_sense"), ConfigError);
  }

  SUBCASE("unknown keys are rejected by name") {
    CHECK_THROWS_WITH_AS(load_config("", {"n_tx_typo=4"}), doctest::Contains("n_tx_typo"),
                         ConfigError);
  }

  SUBCASE("zero power budget is rejected") {
    CHECK_THROWS_WITH_AS(load_config("", {"snr_db=-inf"}), doctest::Contains("snr_db"),
                         ConfigError);
  }

  SUBCASE("dotted sweep overrides") {
    const LoadedRun run = load_config("", {"sweep.n_trials=7", "sweep.omega_values=[0.1,0.2]"});
    CHECK(run.sweep.n_trials == 7);
    CHECK(run.sweep.omega_values == std::vector<double>{0.1, 0.2});
  }

  SUBCASE("enum-valued keys reject unknown strings") {
    CHECK_THROWS_WITH_AS(load_config("", {"init=zeros"}), doctest::Contains("init"), ConfigError);
    CHECK_THROWS_WITH_AS(load_config("", {"conv_metric=rate"}), doctest::Contains("conv_metric"),
                         ConfigError);
    const LoadedRun run = load_config("", {"init=random", "conv_metric=rate_abs"});
    CHECK(run.scenario.init == InitMode::kRandom);
    CHECK(run.scenario.conv_metric == ConvergenceMetric::kRateAbs);
  }
}

TEST_CASE("config files merge below overrides") {
  const fs::path dir = temp_dir("merge");
  const std::string path =
      write_config(dir, "cfg.json", R"({"n_users": 2, "snr_db": 10.0, "seed": 42})");
  const LoadedRun run = load_config(path, {"snr_db=15"});
  CHECK(run.scenario.n_users == 2);
  CHECK(run.scenario.seed == 42);
  CHECK(run.scenario.power_budget == doctest::Approx(std::pow(10.0, 1.5)).epsilon(1e-15));
  REQUIRE(run.scenario.weights_comm.size() == 2);
}

TEST_CASE("resolved config text reloads to the identical configuration") {
  const LoadedRun run = load_config("", {"weight_sense=0.3", "seed=9"});
  const fs::path dir = temp_dir("roundtrip");
  const std::string path = write_config(dir, "resolved.json", run.resolved_text);
  const LoadedRun again = load_config(path, {});
  CHECK(again.scenario.weight_sense == run.scenario.weight_sense);
  CHECK(again.scenario.weights_comm == run.scenario.weights_comm);
  CHECK(again.scenario.power_budget == run.scenario.power_budget);
  CHECK(again.scenario.seed == run.scenario.seed);
  CHECK(again.resolved_text == run.resolved_text);
}

TEST_CASE("manifest embeds a reloadable config block") {
  const LoadedRun run = load_config("", {"seed=31"});
  const std::string manifest = render_manifest(run, "solve", 1, "outdir", {"trace.csv"});
  const fs::path dir = temp_dir("manifest");
  const std::string path = write_config(dir, "manifest.json", manifest);
  const LoadedRun again = load_config(path, {});
  CHECK(again.scenario.seed == 31);
  CHECK(again.resolved_text == run.resolved_text);
}

TEST_CASE("double formatting is shortest round-trip text") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(25.0) == "25");
  CHECK(format_double(std::nan("")) == "nan");
  const double v = 316.22776601683796;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("aggregate CSV schema is frozen") {
  CHECK(std::string(kAggregateCsvHeader) ==
        "sweep_param,value,mean_cmi_per_ue,se_cmi,mean_smi,se_smi,mean_sc_rate,se_sc_rate,"
        "n_trials,n_failed,mean_iters");

  SweepResult r;
  r.kind = "omega";
  r.omega_values = {0.25};
  r.snr_values_db = {25.0};
  PointStats p;
  p.omega_tau = 0.25;
  p.snr_db = 25.0;
  p.n_trials = 2;
  p.n_failed = 0;
  p.mean_cmi_per_ue = 1.5;
  p.se_cmi_per_ue = 0.5;
  p.mean_smi = 2.0;
  p.se_smi = 0.25;
  p.mean_sc_rate = 3.5;
  p.se_sc_rate = 0.75;
  p.mean_iters = 12.5;
  r.points = {p};
  r.trials = {{}};

  const auto files = render_aggregate_csvs(r);
  REQUIRE(files.size() == 1);
  CHECK(files[0].first == "aggregate_omega.csv");
  CHECK(files[0].second ==
        "sweep_param,value,mean_cmi_per_ue,se_cmi,mean_smi,se_smi,mean_sc_rate,se_sc_rate,"
        "n_trials,n_failed,mean_iters\n"
        "omega_tau,0.25,1.5,0.5,2,0.25,3.5,0.75,2,0,12.5\n");
}

TEST_CASE("trace CSV aligns iterations with their trace entries") {
  SolverState st;
  st.rate_trace = {1.0, 2.0, 2.5};
  st.objective_trace = {5.0, 4.0};
  st.lambda_trace = {0.5, 0.25};
  st.power_trace = {10.0, 10.0};
  st.iterations = 2;
  CHECK(render_trace_csv(st) ==
        "iter,objective,weighted_rate,lambda,power\n"
        "0,nan,1,nan,nan\n"
        "1,5,2,0.5,10\n"
        "2,4,2.5,0.25,10\n");
}

TEST_CASE("cli: solve, sweep, validation and exit codes") {
  const fs::path dir = temp_dir("cli");

  SUBCASE("solve writes a trace and a manifest") {
    const std::string out = (dir / "solve_out").string();
    const int code = run_cli(
        "solve --seed 7 --out " + out +
        " --set n_tx=6 --set n_rx=3 --set n_users=2 --set n_ue_ant=2 --set n_paths=3");
    CHECK(code == 0);
    CHECK(fs::exists(fs::path(out) / "trace.csv"));
    CHECK(fs::exists(fs::path(out) / "manifest.json"));
  }

  SUBCASE("invalid configuration exits with the config code") {
    CHECK(run_cli("solve --set weight_sense=1.5") == 1);
    CHECK(run_cli("solve --set snr_db=-inf") == 1);
  }

  SUBCASE("sweep reruns are byte-identical, including from the manifest") {
    const std::string out1 = (dir / "sweep1").string();
    const std::string out2 = (dir / "sweep2").string();
    const std::string out3 = (dir / "sweep3").string();
    const std::string common =
        "sweep omega --trials 2 --seed 3 "
        "--set n_tx=6 --set n_rx=3 --set n_users=2 --set n_ue_ant=2 --set n_paths=3 "
        "--set sweep.omega_values=[0.25,0.75] ";
    CHECK(run_cli(common + "--workers 1 --out " + out1) == 0);
    CHECK(run_cli(common + "--workers 4 --out " + out2) == 0);
    CHECK(run_cli("sweep omega --workers 2 --config " + out1 + "/manifest.json --out " + out3) ==
          0);

    const auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const std::string csv = slurp(fs::path(out1) / "aggregate_omega.csv");
    CHECK(csv == slurp(fs::path(out2) / "aggregate_omega.csv"));
    CHECK(csv == slurp(fs::path(out3) / "aggregate_omega.csv"));
    CHECK(slurp(fs::path(out1) / "trials_omega.jsonl") ==
          slurp(fs::path(out2) / "trials_omega.jsonl"));
    CHECK(slurp(fs::path(out1) / "trials_omega.jsonl") ==
          slurp(fs::path(out3) / "trials_omega.jsonl"));
    CHECK(csv.rfind("sweep_param,", 0) == 0);
  }

  SUBCASE("environment variable supplies the default output directory") {
    const std::string out = (dir / "env_out").string();
    const std::string cmd = "WISAC_OUT_DIR=" + out + " " + std::string(WISAC_BIN) +
                            " solve --seed 5 --set n_tx=6 --set n_rx=3 --set n_users=2"
                            " --set n_ue_ant=2 --set n_paths=3 > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(fs::path(out) / "trace.csv"));
    CHECK(fs::exists(fs::path(out) / "manifest.json"));
  }
}
