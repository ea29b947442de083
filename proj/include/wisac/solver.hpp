// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "wisac/metrics.hpp"

namespace wisac {

/// MSE weight matrices W_k (R x R) / W_tau (S x S), Hermitian PD.
struct Weights {
  std::vector<CMat> comm;
  CMat sense;
};

/// Full state of one solve: final blocks plus per-iteration traces.
/// After solve() returns, combiners/weights/mse are refreshed so they are
/// consistent with the returned precoder.
struct SolverState {
  Precoder precoder;
  Combiners combiners;
  Weights weights;
  MsePair mse;
  double lambda = 0.0;

  std::vector<double> rate_trace;       // weighted sum rate; [0] is the init point
  std::vector<double> objective_trace;  // surrogate objective, one entry per iteration
  std::vector<double> lambda_trace;     // multiplier chosen at each precoder update
  std::vector<double> power_trace;      // transmit power after each precoder update
  int iterations = 0;
  bool converged = false;
  double solve_seconds = 0.0;
};

/// MMSE combiners B_k = A_k^-1 H_k V_k, B_tau = A_tau^-1 G V_tau, via
/// Hermitian solves. Also returns the covariance matrices.
std::pair<Combiners, CovariancePair> update_combiners(const ChannelSet& ch, const Precoder& v,
                                                      const ScenarioConfig& cfg);

/// W = E^-1, symmetrized. Throws ConditioningError when an MSE matrix has an
/// eigenvalue below 1e-14.
Weights update_weights(const MsePair& mse);

/// The multiplier-independent normal-equation pieces of the precoder update:
/// kernel M = sum_i a_i H_i^H B_i W_i B_i^H H_i
///          + a_tau (G^H B W B^H G + sum_l G_l^H B W B^H G_l),
/// rhs_k = a_k H_k^H B_k W_k, rhs_tau = a_tau G^H B_tau W_tau.
struct PrecoderKernel {
  CMat kernel;                 // N_t x N_t, Hermitian PSD
  std::vector<CMat> rhs_comm;  // N_t x R each
  CMat rhs_sense;              // N_t x S
};
PrecoderKernel precoder_rhs_and_kernel(const ChannelSet& ch, const SolverState& state,
                                       const ScenarioConfig& cfg);

/// V = (M + lambda I)^-1 RHS with lambda = 0 when the unconstrained solution
/// already fits the budget, otherwise the bisection root of
/// power(lambda) = P0 (power is strictly decreasing in lambda).
struct PrecoderUpdate {
  Precoder precoder;
  double lambda = 0.0;
  double power = 0.0;
};
PrecoderUpdate update_precoders(const ChannelSet& ch, const SolverState& state,
                                const ScenarioConfig& cfg);

/// Surrogate objective sum_k a_k (Tr(W_k E_k) - log2 det W_k) + the sensing
/// term, evaluated on the current state blocks.
double objective(const ChannelSet& ch, const SolverState& state, const ScenarioConfig& cfg);

/// The quantity the precoder step minimizes: the weighted fixed-combiner MSE
/// objective plus the multiplier term lambda (power - P0).
double lagrangian_fixed_blocks(const ChannelSet& ch, const Precoder& v, const Combiners& b,
                               const Weights& w, double lambda, const ScenarioConfig& cfg);

/// Target selector for per-block gradients: a user index, or the sensing
/// stream.
inline constexpr int kSensingTarget = -1;

/// Closed-form gradient of lagrangian_fixed_blocks with respect to the chosen
/// precoder block, assembled from the self term, the cross terms of every
/// other receiver, and the 2 lambda V penalty term. Convention: the returned
/// matrix G satisfies d f = Re(G_mn) for a unit step in Re(V_mn) and
/// Im(G_mn) for a unit step in Im(V_mn).
CMat gradient_closed_form(const ChannelSet& ch, const Precoder& v, const Combiners& b,
                          const Weights& w, double lambda, const ScenarioConfig& cfg, int target);

/// Compares the closed-form gradient against central finite differences of
/// lagrangian_fixed_blocks over every real and imaginary coordinate of the
/// target block. Returns max |closed - fd| / max(||closed||_inf, ||fd||_inf).
double gradient_check(const ChannelSet& ch, const SolverState& state, const ScenarioConfig& cfg,
                      int target, double step = 1e-5);

/// Deterministic nonzero start: each user block spans the dominant right
/// singular vectors of its channel, the sensing block points at the recorded
/// target departure angle, jointly scaled to total power P0.
Precoder matched_filter_init(const ChannelSet& ch, const ScenarioConfig& cfg);

/// Complex-Gaussian entries scaled to total power P0.
Precoder random_init(const ChannelSet& ch, const ScenarioConfig& cfg, TrialRng& rng);

/// Block-coordinate descent: combiners -> MSE -> weights -> precoders until
/// the weighted sum rate moves less than cfg.tol between iterations or
/// cfg.max_iters is reached. An explicit init overrides cfg.init; inits above
/// the power budget are scaled onto it.
SolverState solve(const ChannelSet& ch, const ScenarioConfig& cfg,
                  const std::optional<Precoder>& init = std::nullopt);

}  // namespace wisac
