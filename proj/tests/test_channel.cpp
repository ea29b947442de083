// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support/instances.hpp"
#include "support/oracles.hpp"
#include "wisac/channel.hpp"

using namespace wisac;

TEST_CASE("steering vector: zero angle gives a flat unit-amplitude response") {
  const CVec a = steering_vector(0.0, 4);
  REQUIRE(a.size() == 4);
  for (int m = 0; m < 4; ++m) {
    CHECK(a(m).real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(a(m).imag() == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("steering vector: endfire two-element array alternates sign") {
  const CVec a = steering_vector(std::numbers::pi / 2.0, 2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(a(0).real() == doctest::Approx(inv_sqrt2));
  CHECK(a(1).real() == doctest::Approx(-inv_sqrt2));
  CHECK(std::abs(a(1).imag()) < 1e-12);
}

TEST_CASE("steering vector: unit squared norm across angles and sizes") {
  TrialRng rng(2024, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 32);
    const double angle = rng.uniform_angle();
    CHECK(std::abs(steering_vector(angle, n).squaredNorm() - 1.0) < 1e-12);
  }
}

TEST_CASE("steering vector: domain checks") {
  CHECK_THROWS_AS(steering_vector(1.8, 4), std::domain_error);
  CHECK_THROWS_AS(steering_vector(-2.0, 4), std::domain_error);
  CHECK_THROWS_AS(steering_vector(0.0, 0), std::invalid_argument);
}

TEST_CASE("multipath normalization for the default array geometry") {
  // sqrt(16 * 4 / 10)
  CHECK(sv_gain(16, 4, 10) == doctest::Approx(2.5298221281347035).epsilon(1e-15));
}

TEST_CASE("single-path channel is the scaled steering outer product") {
  ScenarioConfig cfg = default_config();
  cfg.n_paths = 1;

  const std::vector<PathDraw> paths = {{0.0, 0.0, {1.0, 0.0}}};
  const CMat h = comm_channel_from_draws(cfg, paths);
  REQUIRE(h.rows() == 4);
  REQUIRE(h.cols() == 16);

  const double gamma = sv_gain(16, 4, 1);
  const CMat expected = gamma * steering_vector(0.0, 4) * steering_vector(0.0, 16).adjoint();
  CHECK((h - expected).norm() < 1e-12);
  CHECK(std::abs(h.norm() - gamma) < 1e-12);
  CHECK(oracles::second_singular_ratio(h) < 1e-12);
}

TEST_CASE("average channel energy matches the path-variance budget") {
  // gamma^2 (var_los + (P-1) var_nlos) = 6.4 * (1000 + 9 * 100) = 12160
  const ScenarioConfig cfg = default_config();
  TrialRng rng(123, 0);
  const int n_draws = 20000;
  double acc = 0.0;
  for (int i = 0; i < n_draws; ++i)
    acc += comm_channel_from_draws(cfg, draw_comm_paths(cfg, rng)).squaredNorm();
  const double mean = acc / n_draws;
  CHECK(mean == doctest::Approx(12160.0).epsilon(0.03));
}

TEST_CASE("sensing channels: shapes, rank and gain statistics") {
  ScenarioConfig cfg = default_config();

  SUBCASE("no clutter patches requested") {
    cfg.n_clutters = 0;
    cfg.clutter_gain_vars.clear();
    cfg.fill_derived();
    TrialRng rng(5, 1);
    const SensingChannels s = gen_sensing_channels(cfg, rng);
    CHECK(s.clutter.empty());
    CHECK(s.target.rows() == cfg.n_rx);
    CHECK(s.target.cols() == cfg.n_tx);
  }

  SUBCASE("target channel is rank one") {
    TrialRng rng(5, 2);
    const SensingChannels s = gen_sensing_channels(cfg, rng);
    CHECK(oracles::second_singular_ratio(s.target) < 1e-10);
    for (const CMat& g : s.clutter) CHECK(oracles::second_singular_ratio(g) < 1e-10);
  }

  SUBCASE("mean target energy equals the gain variance") {
    TrialRng rng(17, 3);
    const int n_draws = 20000;
    double acc = 0.0;
    for (int i = 0; i < n_draws; ++i) acc += gen_sensing_channels(cfg, rng).target.squaredNorm();
    CHECK(acc / n_draws == doctest::Approx(cfg.target_gain_var).epsilon(0.03));
  }
}

TEST_CASE("comm channel generator checks the user index") {
  const ScenarioConfig cfg = default_config();
  TrialRng rng(1, 1);
  CHECK_THROWS_AS(gen_comm_channel(cfg, cfg.n_users, rng), std::invalid_argument);
  CHECK_THROWS_AS(gen_comm_channel(cfg, -1, rng), std::invalid_argument);
  const CMat h = gen_comm_channel(cfg, 0, rng);
  CHECK(h.rows() == cfg.n_ue_ant);
  CHECK(h.cols() == cfg.n_tx);
}

TEST_CASE("scenario sampling is deterministic in (seed, trial)") {
  const ScenarioConfig cfg = default_config();
  const ChannelSet a = sample_scenario(cfg, 3);
  const ChannelSet b = sample_scenario(cfg, 3);

  REQUIRE(a.comm.size() == b.comm.size());
  for (size_t k = 0; k < a.comm.size(); ++k) CHECK(a.comm[k] == b.comm[k]);
  CHECK(a.sense == b.sense);
  REQUIRE(a.clutter.size() == b.clutter.size());
  for (size_t l = 0; l < a.clutter.size(); ++l) CHECK(a.clutter[l] == b.clutter[l]);
  CHECK(a.draws.target.aoa == b.draws.target.aoa);

  const ChannelSet c = sample_scenario(cfg, 4);
  CHECK(a.draws.target.aoa != c.draws.target.aoa);
  CHECK(a.comm[0] != c.comm[0]);
}

TEST_CASE("channel set dimensions follow the configuration") {
  const ScenarioConfig base = default_config();
  const ChannelSet ch = sample_scenario(base, 0);
  CHECK(ch.comm.size() == 3);
  CHECK(ch.clutter.size() == 3);

  TrialRng rng(99, 0);
  for (int trial = 0; trial < 10; ++trial) {
    ScenarioConfig cfg;
    cfg.n_tx = 2 + static_cast<int>(rng.uniform() * 12);
    cfg.n_rx = 1 + static_cast<int>(rng.uniform() * 6);
    cfg.n_users = 1 + static_cast<int>(rng.uniform() * 4);
    cfg.n_ue_ant = 1 + static_cast<int>(rng.uniform() * 4);
    cfg.n_paths = 1 + static_cast<int>(rng.uniform() * 6);
    cfg.n_clutters = static_cast<int>(rng.uniform() * 4);
    cfg.fill_derived();
    cfg.validate();

    const ChannelSet set = sample_scenario(cfg, trial);
    REQUIRE(set.comm.size() == static_cast<size_t>(cfg.n_users));
    for (const CMat& h : set.comm) {
      CHECK(h.rows() == cfg.n_ue_ant);
      CHECK(h.cols() == cfg.n_tx);
    }
    CHECK(set.sense.rows() == cfg.n_rx);
    CHECK(set.sense.cols() == cfg.n_tx);
    REQUIRE(set.clutter.size() == static_cast<size_t>(cfg.n_clutters));
    REQUIRE(set.draws.comm.size() == static_cast<size_t>(cfg.n_users));
    CHECK(set.draws.comm[0].size() == static_cast<size_t>(cfg.n_paths));
  }
}
