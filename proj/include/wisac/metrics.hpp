// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "wisac/channel.hpp"
#include "wisac/config.hpp"

namespace wisac {

/// Transmit beamformers: one N_t x R block per user plus the N_t x S
/// sensing block. The optimization variable.
struct Precoder {
  std::vector<CMat> comm;
  CMat sense;
};

/// Tr(sum_k V_k V_k^H) + Tr(V_tau V_tau^H).
double total_power(const Precoder& v);

/// Receive combiners: B_k (R x R) per user, B_tau (N_r x S).
struct Combiners {
  std::vector<CMat> comm;
  CMat sense;
};

/// Received-signal covariance matrices A_k (R x R) / A_tau (N_r x N_r).
struct CovariancePair {
  std::vector<CMat> per_user;
  CMat sensing;
};

/// MSE matrices E_k (R x R) / E_tau (S x S); Hermitian with spectrum in (0, 1].
struct MsePair {
  std::vector<CMat> per_user;
  CMat sensing;
};

/// Per-user CMI rates, SMI rate and the weighted sum, all in bits per
/// channel use.
struct RateReport {
  std::vector<double> comm_rates;
  double sense_rate = 0.0;
  double weighted_sum = 0.0;
};

/// A_k = sum_i H_k V_i V_i^H H_k^H + H_k V_tau V_tau^H H_k^H + noise_var I.
CMat covariance_user(const ChannelSet& ch, const Precoder& v, int k, double noise_var);

/// A_tau = G V_tau V_tau^H G^H + sum_j G V_j V_j^H G^H
///         + sum_l (sum_n G_l V_n V_n^H G_l^H + G_l V_tau V_tau^H G_l^H)
///         + noise_var I,   with G the target channel.
CMat covariance_sensing(const ChannelSet& ch, const Precoder& v, double noise_var);

/// CMI rate of user k: log2 det(I + signal * interference^-1), evaluated as
/// the log-det difference of two Cholesky factorizations.
double cmi_rate(const ChannelSet& ch, const Precoder& v, int k, double noise_var);

/// SMI rate of the target: log det(I + SCNR) with clutter, user interference
/// reflected off the target path, and noise in the denominator.
double smi_rate(const ChannelSet& ch, const Precoder& v, double noise_var);

/// MMSE matrices E_k = I - V_k^H H_k^H A_k^-1 H_k V_k (and the sensing
/// analogue). Assumes the combiners are the MMSE ones for (ch, v), so that
/// E_k = I - (H_k V_k)^H B_k.
MsePair mse_matrices(const ChannelSet& ch, const Precoder& v, const Combiners& b);

/// MSE at an arbitrary fixed combiner,
/// E = I - B^H X - X^H B + B^H A B with X the through-channel precoder.
/// Coincides with mse_matrices when B is the MMSE combiner.
MsePair mse_fixed_combiners(const ChannelSet& ch, const Precoder& v, const Combiners& b,
                            const ScenarioConfig& cfg);

/// All rates plus sum_k alpha_k R_k + omega_tau R_tau.
RateReport weighted_sum_rate(const ChannelSet& ch, const Precoder& v, const ScenarioConfig& cfg);

}  // namespace wisac
