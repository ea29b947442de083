// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wisac/config.hpp"
#include "wisac/rng.hpp"

namespace wisac {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// One drawn propagation path: angle of arrival, angle of departure, gain.
struct PathDraw {
  double aoa = 0.0;
  double aod = 0.0;
  std::complex<double> gain{0.0, 0.0};
};

/// Every random draw behind a ChannelSet, kept for reproducibility.
struct ChannelDraws {
  std::vector<std::vector<PathDraw>> comm;  // [user][path], path 0 is LOS
  PathDraw target;
  std::vector<PathDraw> clutter;
};

/// One channel realization: user channels H_k (R x N_t), target channel
/// G_tau (N_r x N_t) and clutter channels G_l (N_r x N_t).
struct ChannelSet {
  std::vector<CMat> comm;
  CMat sense;
  std::vector<CMat> clutter;
  ChannelDraws draws;
};

/// Unit-norm response of an n-element half-wavelength ULA: element m carries
/// phase pi * m * sin(angle).
///
/// Throws std::domain_error for angles outside [-pi/2, pi/2] and
/// std::invalid_argument for n < 1.
CVec steering_vector(double angle_rad, int n_elements);

/// Multipath normalization sqrt(n_tx * n_ue_ant / n_paths).
double sv_gain(int n_tx, int n_ue_ant, int n_paths);

/// gain * a_rx(aoa) * a_tx(aod)^H, the single-scatterer channel shape.
CMat rank_one_channel(std::complex<double> gain, double aoa, double aod, int n_rx, int n_tx);

/// Draws the n_paths path parameters of one user channel. Path 0 uses the
/// LOS variance, the rest the NLOS variance; angles are uniform on
/// [-pi/2, pi/2).
std::vector<PathDraw> draw_comm_paths(const ScenarioConfig& cfg, TrialRng& rng);

/// Assembles H_k from drawn paths (sum of scaled rank-one terms).
CMat comm_channel_from_draws(const ScenarioConfig& cfg, std::span<const PathDraw> paths);

CMat gen_comm_channel(const ScenarioConfig& cfg, int user_idx, TrialRng& rng);

struct SensingChannels {
  CMat target;
  std::vector<CMat> clutter;
  PathDraw target_draw;
  std::vector<PathDraw> clutter_draws;
};

SensingChannels gen_sensing_channels(const ScenarioConfig& cfg, TrialRng& rng);

/// One Monte-Carlo realization; deterministic in (cfg.seed, trial_idx).
ChannelSet sample_scenario(const ScenarioConfig& cfg, int trial_idx);

}  // namespace wisac
