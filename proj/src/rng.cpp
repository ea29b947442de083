// SPDX-License-Identifier: Apache-2.0
#include "wisac/rng.hpp"

#include <cmath>

namespace wisac {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x1d872b41b0c7fb27ULL))) {}

double TrialRng::uniform() {
  // 53 mantissa bits of one engine word.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double TrialRng::uniform_angle() {
  constexpr double kPi = 3.14159265358979323846;
  return (uniform() - 0.5) * kPi;
}

double TrialRng::gaussian() {
  constexpr double kTwoPi = 6.28318530717958647692;
  const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::complex<double> TrialRng::complex_gaussian(double variance) {
  const double scale = std::sqrt(variance / 2.0);
  const double re = gaussian();
  const double im = gaussian();
  return {scale * re, scale * im};
}

}  // namespace wisac
