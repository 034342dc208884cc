// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace critx {

/// Invalid argument or precondition violation (bad site index, wrong popcount,
/// dimension mismatch, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent or unresolvable sweep configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver did not reach its tolerance. Carries the best residual
/// seen so callers can report it.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}

  [[nodiscard]] double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// A computation is well defined only for a unique ground state and the
/// solver detected (near-)degeneracy or a level crossing.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An analysis step declined to produce a result (peak on the grid boundary,
/// unbracketed minimum, too few sizes, ...).
class AnalysisRefusal : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace critx
