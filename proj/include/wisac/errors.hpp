// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace wisac {

/// Invalid or inconsistent scenario/sweep configuration. The message names
/// the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A matrix that must be well conditioned (an MSE matrix about to be
/// inverted) fell below the conditioning floor.
struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solver-level failure (unbracketable multiplier, all trials failed, ...).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wisac
