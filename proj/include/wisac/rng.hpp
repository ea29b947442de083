// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace wisac {

/// Deterministic random stream for one (seed, stream) pair. Streams are
/// decorrelated by a splitmix64 hash of the pair, so trial i of a run never
/// depends on how many workers executed trials before it.
///
/// All variates are derived from raw 64-bit engine output; no std::
/// distribution is involved, so the draw sequence is identical across
/// standard-library implementations.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on [0, 1).
  double uniform();

  /// Uniform on [-pi/2, pi/2).
  double uniform_angle();

  /// Standard normal via Box-Muller (two uniforms per draw).
  double gaussian();

  /// Circularly-symmetric complex Gaussian with E|x|^2 = variance.
  std::complex<double> complex_gaussian(double variance);

 private:
  std::mt19937_64 engine_;
};

}  // namespace wisac
