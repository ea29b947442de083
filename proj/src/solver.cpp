// SPDX-License-Identifier: Apache-2.0
#include "wisac/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wisac/linalg.hpp"

namespace wisac {

namespace {

constexpr double kWeightEigFloor = 1e-14;
constexpr std::uint64_t kRandomInitStream = 0x726e64696e6974ULL;

// Bisection controls. The power tolerance is kept well below the 1e-9
// per-step monotonicity budget of the outer loop; each evaluation is O(N_t)
// once the kernel is diagonalized, so the extra iterations are free.
constexpr double kPowerRelTol = 1e-12;
constexpr int kMaxBisectIters = 500;

const CMat& target_block(const Precoder& v, int target) {
  return target == kSensingTarget ? v.sense : v.comm[static_cast<size_t>(target)];
}

void check_state_shapes(const ChannelSet& ch, const ScenarioConfig& cfg) {
  if (ch.comm.size() != static_cast<size_t>(cfg.n_users))
    throw std::invalid_argument("solver: channel set user count mismatch with config");
  if (cfg.weights_comm.size() != static_cast<size_t>(cfg.n_users))
    throw std::invalid_argument("solver: weights_comm not resolved (call fill_derived)");
}

// Diagonalized normal equations; power(lambda) and the solution share the
// spectral decomposition of the kernel, so each bisection step is O(N_t C).
class MultiplierPath {
 public:
  MultiplierPath(const CMat& kernel, const std::vector<CMat>& rhs_comm, const CMat& rhs_sense) {
    Eigen::SelfAdjointEigenSolver<CMat> es(kernel);
    eigs_ = es.eigenvalues().cwiseMax(0.0);
    basis_ = es.eigenvectors();

    Eigen::Index cols = rhs_sense.cols();
    for (const CMat& r : rhs_comm) cols += r.cols();
    CMat rhs(kernel.rows(), cols);
    Eigen::Index at = 0;
    for (const CMat& r : rhs_comm) {
      rhs.middleCols(at, r.cols()) = r;
      at += r.cols();
    }
    rhs.middleCols(at, rhs_sense.cols()) = rhs_sense;

    rhs_rot_ = basis_.adjoint() * rhs;
    row_energy_ = rhs_rot_.rowwise().squaredNorm();
    eig_floor_ = eigs_.size() > 0 ? eigs_.maxCoeff() * 1e-13 : 0.0;
  }

  // Total transmit power of the regularized solution. At lambda = 0 the
  // kernel may be singular; directions below the eigenvalue floor carry no
  // right-hand side (the RHS lies in the kernel's range) and are dropped.
  double power_at(double lambda) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < eigs_.size(); ++i) {
      const double d = eigs_(i);
      if (lambda == 0.0 && d <= eig_floor_) continue;
      const double denom = d + lambda;
      acc += row_energy_(i) / (denom * denom);
    }
    return acc;
  }

  CMat solution(double lambda) const {
    CMat scaled = rhs_rot_;
    for (Eigen::Index i = 0; i < eigs_.size(); ++i) {
      const double d = eigs_(i);
      if (lambda == 0.0 && d <= eig_floor_)
        scaled.row(i).setZero();
      else
        scaled.row(i) /= (d + lambda);
    }
    return basis_ * scaled;
  }

 private:
  Eigen::VectorXd eigs_;
  CMat basis_;
  CMat rhs_rot_;
  Eigen::VectorXd row_energy_;
  double eig_floor_ = 0.0;
};

Precoder split_columns(const CMat& stacked, const std::vector<CMat>& rhs_comm,
                       const CMat& rhs_sense) {
  Precoder v;
  v.comm.reserve(rhs_comm.size());
  Eigen::Index at = 0;
  for (const CMat& r : rhs_comm) {
    v.comm.push_back(stacked.middleCols(at, r.cols()));
    at += r.cols();
  }
  v.sense = stacked.middleCols(at, rhs_sense.cols());
  return v;
}

}  // namespace

std::pair<Combiners, CovariancePair> update_combiners(const ChannelSet& ch, const Precoder& v,
                                                      const ScenarioConfig& cfg) {
  Combiners b;
  CovariancePair a;
  b.comm.reserve(ch.comm.size());
  a.per_user.reserve(ch.comm.size());
  for (size_t k = 0; k < ch.comm.size(); ++k) {
    a.per_user.push_back(covariance_user(ch, v, static_cast<int>(k), cfg.noise_power_comm));
    b.comm.push_back(
        Eigen::LLT<CMat>(a.per_user.back()).solve(ch.comm[k] * v.comm[k]));
  }
  a.sensing = covariance_sensing(ch, v, cfg.noise_power_sense);
  b.sense = Eigen::LLT<CMat>(a.sensing).solve(ch.sense * v.sense);
  return {std::move(b), std::move(a)};
}

namespace {

CMat invert_mse(const CMat& e, const char* label) {
  Eigen::SelfAdjointEigenSolver<CMat> es(e);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < kWeightEigFloor) {
    std::ostringstream msg;
    msg << "update_weights: " << label << " MSE matrix is numerically singular (min eigenvalue "
        << min_eig << ")";
    throw ConditioningError(msg.str());
  }
  return hermitian_part(es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                        es.eigenvectors().adjoint());
}

}  // namespace

Weights update_weights(const MsePair& mse) {
  Weights w;
  w.comm.reserve(mse.per_user.size());
  for (const CMat& e : mse.per_user) w.comm.push_back(invert_mse(e, "user"));
  w.sense = invert_mse(mse.sensing, "sensing");
  return w;
}

PrecoderKernel precoder_rhs_and_kernel(const ChannelSet& ch, const SolverState& state,
                                       const ScenarioConfig& cfg) {
  check_state_shapes(ch, cfg);
  const Combiners& b = state.combiners;
  const Weights& w = state.weights;

  PrecoderKernel out;
  out.kernel = CMat::Zero(cfg.n_tx, cfg.n_tx);
  out.rhs_comm.reserve(ch.comm.size());
  for (size_t i = 0; i < ch.comm.size(); ++i) {
    const CMat t = ch.comm[i].adjoint() * b.comm[i];  // N_t x R
    const CMat tw = t * w.comm[i];
    out.kernel += cfg.weights_comm[i] * tw * t.adjoint();
    out.rhs_comm.push_back(cfg.weights_comm[i] * tw);
  }
  const CMat tt = ch.sense.adjoint() * b.sense;  // N_t x S
  const CMat ttw = tt * w.sense;
  out.kernel += cfg.weight_sense * ttw * tt.adjoint();
  for (const CMat& g : ch.clutter) {
    const CMat tl = g.adjoint() * b.sense;
    out.kernel += cfg.weight_sense * tl * w.sense * tl.adjoint();
  }
  out.rhs_sense = cfg.weight_sense * ttw;
  out.kernel = hermitian_part(out.kernel);
  return out;
}

PrecoderUpdate update_precoders(const ChannelSet& ch, const SolverState& state,
                                const ScenarioConfig& cfg) {
  const PrecoderKernel k = precoder_rhs_and_kernel(ch, state, cfg);

  double rhs_norm2 = k.rhs_sense.squaredNorm();
  for (const CMat& r : k.rhs_comm) rhs_norm2 += r.squaredNorm();
  if (rhs_norm2 == 0.0) {
    PrecoderUpdate up;
    up.precoder.comm.reserve(k.rhs_comm.size());
    for (const CMat& r : k.rhs_comm) up.precoder.comm.push_back(CMat::Zero(r.rows(), r.cols()));
    up.precoder.sense = CMat::Zero(k.rhs_sense.rows(), k.rhs_sense.cols());
    return up;
  }

  const MultiplierPath path(k.kernel, k.rhs_comm, k.rhs_sense);
  const double p0 = cfg.power_budget;

  double lambda = 0.0;
  if (path.power_at(0.0) > p0) {
    // Bracket: power is strictly decreasing; double the upper end from 1.
    double lo = 0.0;
    double hi = 1.0;
    int doublings = 0;
    while (path.power_at(hi) > p0) {
      lo = hi;
      hi *= 2.0;
      if (++doublings > 200)
        throw SolverError("update_precoders: failed to bracket the power multiplier");
    }
    lambda = hi;
    for (int it = 0; it < kMaxBisectIters; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double pm = path.power_at(mid);
      if (std::abs(pm - p0) <= kPowerRelTol * p0) {
        lambda = mid;
        break;
      }
      if (pm > p0)
        lo = mid;
      else
        hi = mid;
      lambda = hi;  // feasible endpoint
      if (hi - lo <= 1e-13 * std::max(1.0, hi)) break;
    }
  }

  PrecoderUpdate up;
  up.precoder = split_columns(path.solution(lambda), k.rhs_comm, k.rhs_sense);
  up.lambda = lambda;
  up.power = total_power(up.precoder);
  return up;
}

double objective(const ChannelSet& ch, const SolverState& state, const ScenarioConfig& cfg) {
  check_state_shapes(ch, cfg);
  double acc = 0.0;
  for (size_t k = 0; k < state.weights.comm.size(); ++k) {
    const double a = cfg.weights_comm[k];
    if (a == 0.0) continue;
    acc += a * ((state.weights.comm[k] * state.mse.per_user[k]).trace().real() -
                log2det_pd(state.weights.comm[k]));
  }
  if (cfg.weight_sense != 0.0)
    acc += cfg.weight_sense * ((state.weights.sense * state.mse.sensing).trace().real() -
                               log2det_pd(state.weights.sense));
  return acc;
}

double lagrangian_fixed_blocks(const ChannelSet& ch, const Precoder& v, const Combiners& b,
                               const Weights& w, double lambda, const ScenarioConfig& cfg) {
  const MsePair e = mse_fixed_combiners(ch, v, b, cfg);
  double acc = 0.0;
  for (size_t k = 0; k < e.per_user.size(); ++k) {
    const double a = cfg.weights_comm[k];
    if (a == 0.0) continue;
    acc += a * ((w.comm[k] * e.per_user[k]).trace().real() - log2det_pd(w.comm[k]));
  }
  if (cfg.weight_sense != 0.0)
    acc += cfg.weight_sense *
           ((w.sense * e.sensing).trace().real() - log2det_pd(w.sense));
  return acc + lambda * (total_power(v) - cfg.power_budget);
}

CMat gradient_closed_form(const ChannelSet& ch, const Precoder& v, const Combiners& b,
                          const Weights& w, double lambda, const ScenarioConfig& cfg, int target) {
  check_state_shapes(ch, cfg);
  const CMat& vt = target_block(v, target);
  CMat g = 2.0 * lambda * vt;

  // Quadratic terms: every receiver sees this block through its own channel.
  for (size_t i = 0; i < ch.comm.size(); ++i) {
    const CMat t = ch.comm[i].adjoint() * b.comm[i];
    g += 2.0 * cfg.weights_comm[i] * (t * (w.comm[i] * (t.adjoint() * vt)));
  }
  const CMat tt = ch.sense.adjoint() * b.sense;
  CMat sense_quad = tt * (w.sense * (tt.adjoint() * vt));
  for (const CMat& gc : ch.clutter) {
    const CMat tl = gc.adjoint() * b.sense;
    sense_quad += tl * (w.sense * (tl.adjoint() * vt));
  }
  g += 2.0 * cfg.weight_sense * sense_quad;

  // Linear term of the receiver that owns this block.
  if (target == kSensingTarget)
    g -= 2.0 * cfg.weight_sense * (tt * w.sense);
  else {
    const size_t k = static_cast<size_t>(target);
    g -= 2.0 * cfg.weights_comm[k] * ((ch.comm[k].adjoint() * b.comm[k]) * w.comm[k]);
  }
  return g;
}

double gradient_check(const ChannelSet& ch, const SolverState& state, const ScenarioConfig& cfg,
                      int target, double step) {
  const CMat g_cf = gradient_closed_form(ch, state.precoder, state.combiners, state.weights,
                                         state.lambda, cfg, target);

  Precoder v = state.precoder;
  CMat& block = target == kSensingTarget ? v.sense : v.comm[static_cast<size_t>(target)];
  const auto eval = [&]() {
    return lagrangian_fixed_blocks(ch, v, state.combiners, state.weights, state.lambda, cfg);
  };

  CMat g_fd(block.rows(), block.cols());
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      const std::complex<double> orig = block(r, c);
      block(r, c) = orig + step;
      const double f_re_p = eval();
      block(r, c) = orig - step;
      const double f_re_m = eval();
      block(r, c) = orig + std::complex<double>(0.0, step);
      const double f_im_p = eval();
      block(r, c) = orig - std::complex<double>(0.0, step);
      const double f_im_m = eval();
      block(r, c) = orig;
      g_fd(r, c) = {(f_re_p - f_re_m) / (2.0 * step), (f_im_p - f_im_m) / (2.0 * step)};
    }
  }

  const double scale = std::max({g_cf.cwiseAbs().maxCoeff(), g_fd.cwiseAbs().maxCoeff(), 1e-300});
  return (g_cf - g_fd).cwiseAbs().maxCoeff() / scale;
}

Precoder matched_filter_init(const ChannelSet& ch, const ScenarioConfig& cfg) {
  check_state_shapes(ch, cfg);
  Precoder v;
  v.comm.reserve(ch.comm.size());
  for (const CMat& h : ch.comm) {
    Eigen::JacobiSVD<CMat> svd(h, Eigen::ComputeThinV);
    CMat block = CMat::Zero(cfg.n_tx, cfg.n_ue_ant);
    const Eigen::Index cols = std::min<Eigen::Index>(svd.matrixV().cols(), cfg.n_ue_ant);
    block.leftCols(cols) = svd.matrixV().leftCols(cols);
    v.comm.push_back(std::move(block));
  }
  const CVec beam = steering_vector(ch.draws.target.aod, cfg.n_tx);
  v.sense = beam.replicate(1, cfg.n_sense_streams);

  const double scale = std::sqrt(cfg.power_budget / total_power(v));
  for (CMat& b : v.comm) b *= scale;
  v.sense *= scale;
  return v;
}

Precoder random_init(const ChannelSet& ch, const ScenarioConfig& cfg, TrialRng& rng) {
  check_state_shapes(ch, cfg);
  Precoder v;
  v.comm.reserve(ch.comm.size());
  const auto fill = [&rng](CMat& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng.complex_gaussian(1.0);
  };
  for (size_t k = 0; k < ch.comm.size(); ++k) {
    CMat block(cfg.n_tx, cfg.n_ue_ant);
    fill(block);
    v.comm.push_back(std::move(block));
  }
  v.sense.resize(cfg.n_tx, cfg.n_sense_streams);
  fill(v.sense);

  const double scale = std::sqrt(cfg.power_budget / total_power(v));
  for (CMat& b : v.comm) b *= scale;
  v.sense *= scale;
  return v;
}

SolverState solve(const ChannelSet& ch, const ScenarioConfig& cfg,
                  const std::optional<Precoder>& init) {
  check_state_shapes(ch, cfg);
  const auto t0 = std::chrono::steady_clock::now();

  SolverState st;
  if (init)
    st.precoder = *init;
  else if (cfg.init == InitMode::kRandom) {
    TrialRng rng(cfg.seed, kRandomInitStream);
    st.precoder = random_init(ch, cfg, rng);
  } else
    st.precoder = matched_filter_init(ch, cfg);

  const double init_power = total_power(st.precoder);
  if (init_power > cfg.power_budget * (1.0 + 1e-12) && init_power > 0.0) {
    const double scale = std::sqrt(cfg.power_budget / init_power);
    for (CMat& b : st.precoder.comm) b *= scale;
    st.precoder.sense *= scale;
  }

  double rate_prev = weighted_sum_rate(ch, st.precoder, cfg).weighted_sum;
  st.rate_trace.push_back(rate_prev);
  double obj_prev = std::numeric_limits<double>::quiet_NaN();

  for (int it = 1; it <= cfg.max_iters; ++it) {
    auto [b, cov] = update_combiners(ch, st.precoder, cfg);
    (void)cov;
    st.combiners = std::move(b);
    st.mse = mse_matrices(ch, st.precoder, st.combiners);
    st.weights = update_weights(st.mse);
    const double obj = objective(ch, st, cfg);
    st.objective_trace.push_back(obj);

    PrecoderUpdate up = update_precoders(ch, st, cfg);
    st.precoder = std::move(up.precoder);
    st.lambda = up.lambda;
    st.lambda_trace.push_back(up.lambda);
    st.power_trace.push_back(up.power);

    const double rate = weighted_sum_rate(ch, st.precoder, cfg).weighted_sum;
    st.rate_trace.push_back(rate);
    st.iterations = it;

    double delta = std::numeric_limits<double>::infinity();
    switch (cfg.conv_metric) {
      case ConvergenceMetric::kRateAbs:
        delta = std::abs(rate - rate_prev);
        break;
      case ConvergenceMetric::kRateRel:
        delta = std::abs(rate - rate_prev) / std::max(std::abs(rate_prev), 1e-12);
        break;
      case ConvergenceMetric::kObjectiveAbs:
        if (it >= 2) delta = std::abs(obj - obj_prev);
        break;
      case ConvergenceMetric::kObjectiveRel:
        if (it >= 2) delta = std::abs(obj - obj_prev) / std::max(std::abs(obj_prev), 1e-12);
        break;
    }
    rate_prev = rate;
    obj_prev = obj;
    if (delta < cfg.tol) {
      st.converged = true;
      break;
    }
  }

  // Leave the returned blocks consistent with the final precoder.
  auto [b_final, cov_final] = update_combiners(ch, st.precoder, cfg);
  (void)cov_final;
  st.combiners = std::move(b_final);
  st.mse = mse_matrices(ch, st.precoder, st.combiners);
  st.weights = update_weights(st.mse);

  st.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return st;
}

}  // namespace wisac
