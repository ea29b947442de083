// SPDX-License-Identifier: Apache-2.0
#include "wisac/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wisac {

CVec steering_vector(double angle_rad, int n_elements) {
  if (n_elements < 1) throw std::invalid_argument("steering_vector: n_elements must be >= 1");
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  if (!(angle_rad >= -kHalfPi && angle_rad <= kHalfPi))
    throw std::domain_error("steering_vector: angle outside [-pi/2, pi/2]");

  const double phase_step = std::numbers::pi * std::sin(angle_rad);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n_elements));
  CVec a(n_elements);
  for (int m = 0; m < n_elements; ++m)
    a(m) = std::polar(amp, phase_step * static_cast<double>(m));
  return a;
}

double sv_gain(int n_tx, int n_ue_ant, int n_paths) {
  return std::sqrt(static_cast<double>(n_tx) * static_cast<double>(n_ue_ant) /
                   static_cast<double>(n_paths));
}

CMat rank_one_channel(std::complex<double> gain, double aoa, double aod, int n_rx, int n_tx) {
  return gain * steering_vector(aoa, n_rx) * steering_vector(aod, n_tx).adjoint();
}

std::vector<PathDraw> draw_comm_paths(const ScenarioConfig& cfg, TrialRng& rng) {
  std::vector<PathDraw> paths(static_cast<size_t>(cfg.n_paths));
  for (int p = 0; p < cfg.n_paths; ++p) {
    PathDraw& d = paths[static_cast<size_t>(p)];
    d.aoa = rng.uniform_angle();
    d.aod = rng.uniform_angle();
    d.gain = rng.complex_gaussian(p == 0 ? cfg.path_var_los : cfg.path_var_nlos);
  }
  return paths;
}

CMat comm_channel_from_draws(const ScenarioConfig& cfg, std::span<const PathDraw> paths) {
  CMat h = CMat::Zero(cfg.n_ue_ant, cfg.n_tx);
  for (const PathDraw& d : paths)
    h += rank_one_channel(d.gain, d.aoa, d.aod, cfg.n_ue_ant, cfg.n_tx);
  return sv_gain(cfg.n_tx, cfg.n_ue_ant, cfg.n_paths) * h;
}

CMat gen_comm_channel(const ScenarioConfig& cfg, int user_idx, TrialRng& rng) {
  if (user_idx < 0 || user_idx >= cfg.n_users)
    throw std::invalid_argument("gen_comm_channel: user_idx out of range");
  return comm_channel_from_draws(cfg, draw_comm_paths(cfg, rng));
}

SensingChannels gen_sensing_channels(const ScenarioConfig& cfg, TrialRng& rng) {
  SensingChannels out;
  out.target_draw.aoa = rng.uniform_angle();
  out.target_draw.aod = rng.uniform_angle();
  out.target_draw.gain = rng.complex_gaussian(cfg.target_gain_var);
  out.target = rank_one_channel(out.target_draw.gain, out.target_draw.aoa, out.target_draw.aod,
                                cfg.n_rx, cfg.n_tx);

  out.clutter.reserve(static_cast<size_t>(cfg.n_clutters));
  out.clutter_draws.resize(static_cast<size_t>(cfg.n_clutters));
  for (int l = 0; l < cfg.n_clutters; ++l) {
    PathDraw& d = out.clutter_draws[static_cast<size_t>(l)];
    d.aoa = rng.uniform_angle();
    d.aod = rng.uniform_angle();
    d.gain = rng.complex_gaussian(cfg.clutter_gain_vars[static_cast<size_t>(l)]);
    out.clutter.push_back(rank_one_channel(d.gain, d.aoa, d.aod, cfg.n_rx, cfg.n_tx));
  }
  return out;
}

ChannelSet sample_scenario(const ScenarioConfig& cfg, int trial_idx) {
  // Draw order is fixed: users (paths in order), then target, then clutter.
  TrialRng rng(cfg.seed, static_cast<std::uint64_t>(trial_idx));
  ChannelSet set;
  set.comm.reserve(static_cast<size_t>(cfg.n_users));
  set.draws.comm.reserve(static_cast<size_t>(cfg.n_users));
  for (int k = 0; k < cfg.n_users; ++k) {
    set.draws.comm.push_back(draw_comm_paths(cfg, rng));
    set.comm.push_back(comm_channel_from_draws(cfg, set.draws.comm.back()));
  }
  SensingChannels s = gen_sensing_channels(cfg, rng);
  set.sense = std::move(s.target);
  set.clutter = std::move(s.clutter);
  set.draws.target = s.target_draw;
  set.draws.clutter = std::move(s.clutter_draws);
  return set;
}

}  // namespace wisac
