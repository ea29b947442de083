// SPDX-License-Identifier: Apache-2.0
#include "wisac/metrics.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include "wisac/linalg.hpp"

namespace wisac {

namespace {

void check_user_index(const ChannelSet& ch, int k) {
  if (k < 0 || static_cast<size_t>(k) >= ch.comm.size())
    throw std::invalid_argument("user index out of range");
}

void check_shapes(const ChannelSet& ch, const Precoder& v) {
  if (v.comm.size() != ch.comm.size())
    throw std::invalid_argument("precoder/channel user count mismatch");
  for (size_t k = 0; k < ch.comm.size(); ++k)
    if (ch.comm[k].cols() != v.comm[k].rows())
      throw std::invalid_argument("precoder/channel inner dimension mismatch");
  if (ch.sense.size() != 0 && v.sense.size() != 0 && ch.sense.cols() != v.sense.rows())
    throw std::invalid_argument("sensing precoder/channel inner dimension mismatch");
}

// Interference-plus-noise covariance at user k: everything in A_k except the
// own-signal term.
CMat interference_user(const ChannelSet& ch, const Precoder& v, int k, double noise_var) {
  const CMat& h = ch.comm[static_cast<size_t>(k)];
  CMat j = noise_var * CMat::Identity(h.rows(), h.rows());
  for (size_t i = 0; i < v.comm.size(); ++i) {
    if (static_cast<int>(i) == k) continue;
    const CMat x = h * v.comm[i];
    j += x * x.adjoint();
  }
  const CMat xt = h * v.sense;
  j += xt * xt.adjoint();
  return hermitian_part(j);
}

// Clutter-plus-user-interference-plus-noise covariance at the sensing
// receiver: everything in A_tau except the target-path sensing signal.
CMat interference_sensing(const ChannelSet& ch, const Precoder& v, double noise_var) {
  CMat j = noise_var * CMat::Identity(ch.sense.rows(), ch.sense.rows());
  for (const CMat& vj : v.comm) {
    const CMat x = ch.sense * vj;
    j += x * x.adjoint();
  }
  for (const CMat& g : ch.clutter) {
    for (const CMat& vn : v.comm) {
      const CMat x = g * vn;
      j += x * x.adjoint();
    }
    const CMat x = g * v.sense;
    j += x * x.adjoint();
  }
  return hermitian_part(j);
}

double logdet_ratio_rate(const CMat& interference, const CMat& signal_spread) {
  const CMat a = hermitian_part(interference + signal_spread * signal_spread.adjoint());
  const double r = log2det_pd(a) - log2det_pd(interference);
  return std::max(0.0, r);
}

}  // namespace

double total_power(const Precoder& v) {
  double p = v.sense.squaredNorm();
  for (const CMat& vk : v.comm) p += vk.squaredNorm();
  return p;
}

CMat covariance_user(const ChannelSet& ch, const Precoder& v, int k, double noise_var) {
  check_user_index(ch, k);
  check_shapes(ch, v);
  const CMat& h = ch.comm[static_cast<size_t>(k)];
  const CMat x = h * v.comm[static_cast<size_t>(k)];
  return hermitian_part(interference_user(ch, v, k, noise_var) + x * x.adjoint());
}

CMat covariance_sensing(const ChannelSet& ch, const Precoder& v, double noise_var) {
  check_shapes(ch, v);
  const CMat x = ch.sense * v.sense;
  return hermitian_part(interference_sensing(ch, v, noise_var) + x * x.adjoint());
}

double cmi_rate(const ChannelSet& ch, const Precoder& v, int k, double noise_var) {
  check_user_index(ch, k);
  check_shapes(ch, v);
  const CMat& h = ch.comm[static_cast<size_t>(k)];
  return logdet_ratio_rate(interference_user(ch, v, k, noise_var),
                           h * v.comm[static_cast<size_t>(k)]);
}

double smi_rate(const ChannelSet& ch, const Precoder& v, double noise_var) {
  check_shapes(ch, v);
  return logdet_ratio_rate(interference_sensing(ch, v, noise_var), ch.sense * v.sense);
}

MsePair mse_matrices(const ChannelSet& ch, const Precoder& v, const Combiners& b) {
  check_shapes(ch, v);
  MsePair e;
  e.per_user.reserve(v.comm.size());
  for (size_t k = 0; k < v.comm.size(); ++k) {
    const CMat x = ch.comm[k] * v.comm[k];
    e.per_user.push_back(
        hermitian_part(CMat::Identity(x.cols(), x.cols()) - x.adjoint() * b.comm[k]));
  }
  const CMat xt = ch.sense * v.sense;
  e.sensing = hermitian_part(CMat::Identity(xt.cols(), xt.cols()) - xt.adjoint() * b.sense);
  return e;
}

MsePair mse_fixed_combiners(const ChannelSet& ch, const Precoder& v, const Combiners& b,
                            const ScenarioConfig& cfg) {
  check_shapes(ch, v);
  MsePair e;
  e.per_user.reserve(v.comm.size());
  for (size_t k = 0; k < v.comm.size(); ++k) {
    const CMat x = ch.comm[k] * v.comm[k];
    const CMat a = covariance_user(ch, v, static_cast<int>(k), cfg.noise_power_comm);
    const CMat& bk = b.comm[k];
    e.per_user.push_back(hermitian_part(CMat::Identity(x.cols(), x.cols()) - bk.adjoint() * x -
                                        x.adjoint() * bk + bk.adjoint() * a * bk));
  }
  const CMat xt = ch.sense * v.sense;
  const CMat at = covariance_sensing(ch, v, cfg.noise_power_sense);
  e.sensing = hermitian_part(CMat::Identity(xt.cols(), xt.cols()) - b.sense.adjoint() * xt -
                             xt.adjoint() * b.sense + b.sense.adjoint() * at * b.sense);
  return e;
}

RateReport weighted_sum_rate(const ChannelSet& ch, const Precoder& v, const ScenarioConfig& cfg) {
  if (ch.comm.size() != static_cast<size_t>(cfg.n_users) ||
      cfg.weights_comm.size() != static_cast<size_t>(cfg.n_users))
    throw std::invalid_argument("weighted_sum_rate: user count mismatch with config");

  RateReport report;
  report.comm_rates.reserve(ch.comm.size());
  double acc = 0.0;
  for (size_t k = 0; k < ch.comm.size(); ++k) {
    const double r = cmi_rate(ch, v, static_cast<int>(k), cfg.noise_power_comm);
    report.comm_rates.push_back(r);
    acc += cfg.weights_comm[k] * r;
  }
  report.sense_rate = smi_rate(ch, v, cfg.noise_power_sense);
  report.weighted_sum = acc + cfg.weight_sense * report.sense_rate;
  return report;
}

}  // namespace wisac
