// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace wisac {

/// log2 det of a Hermitian positive-definite matrix via Cholesky.
inline double log2det_pd(const Eigen::MatrixXcd& a) {
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  double acc = 0.0;
  const auto l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < a.rows(); ++i) acc += std::log2(l(i, i).real());
  return 2.0 * acc;
}

/// Exact-Hermitian projection (A + A^H) / 2, cleaning up accumulation noise.
inline Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& a) {
  return 0.5 * (a + a.adjoint());
}

}  // namespace wisac
