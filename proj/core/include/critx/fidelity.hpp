// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file fidelity.hpp
 * @brief Ground-state fidelity and fidelity susceptibility (FS).
 *
 * Three independent routes to chi(x):
 *  - finite_difference: overlaps of ground states at nearby x (two Lanczos
 *    pairs, Richardson-extrapolated);
 *  - spectral_sum: sum_{n>0} |<n|H_I|0>|^2 / (E_n - E_0)^2 over a dense spectrum;
 *  - linear_response: ||(H - E0)^{-1} Q H_I |0>||^2 via a deflated solve.
 */

#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string_view>

#include "critx/eigensolver.hpp"
#include "critx/models.hpp"

namespace critx {

enum class FsMethod { finite_difference, spectral_sum, linear_response };

[[nodiscard]] std::string_view to_string(FsMethod method) noexcept;
[[nodiscard]] FsMethod parse_fs_method(std::string_view text);

struct FsPoint {
  double x = 0.0;
  double chi = 0.0;
  FsMethod method = FsMethod::finite_difference;
  double delta_used = std::numeric_limits<double>::quiet_NaN();
  double chi_delta = std::numeric_limits<double>::quiet_NaN();       ///< raw value at step delta
  double chi_half_delta = std::numeric_limits<double>::quiet_NaN();  ///< raw value at delta/2
  double residual = 0.0;      ///< worst eigen/solve residual involved
  double gap_estimate = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;         ///< operator applications, summed over solves
};

struct FidelityOptions {
  LanczosOptions lanczos{};
  DeflatedSolveOptions solve{};
  double delta = 1e-3;
};

/// |<a|b>|, clamped to [0, 1]. Throws DomainError on length mismatch.
[[nodiscard]] double overlap(std::span<const double> a, std::span<const double> b);

/// ln |<a|b>| for unit vectors, evaluated through ||a -+ b||^2 so that
/// overlaps within 1e-16 of unity keep full relative precision.
[[nodiscard]] double log_overlap(std::span<const double> a, std::span<const double> b);

using GroundStateFn = std::function<EigResult(double)>;

/// Symmetric finite-difference FS. E(s) = -2 ln F(x - s/2, x + s/2) / s^2 is
/// even in s, so chi = (4 E(delta/2) - E(delta)) / 3 cancels the s^2 error.
/// Refuses near-degenerate ground states and vanishing overlaps.
[[nodiscard]] FsPoint fs_finite_difference(const GroundStateFn& ground, double x, double delta);
[[nodiscard]] FsPoint fs_finite_difference(const HamiltonianFamily& family, double x,
                                           const FidelityOptions& options = {});

/// Spectral sum over a complete spectrum of H(x). Refuses a degenerate ground level.
[[nodiscard]] FsPoint fs_spectral_sum(const Spectrum& spectrum, const LinearMap& driving,
                                      double x = 0.0);
[[nodiscard]] FsPoint fs_spectral_sum(const HamiltonianFamily& family, double x);

/// chi = ||x||^2 with (H - E0) x = Q H_I psi0.
[[nodiscard]] FsPoint fs_linear_response(const LinearMap& apply, double E0,
                                         std::span<const double> psi0, const LinearMap& driving,
                                         const DeflatedSolveOptions& options = {});
[[nodiscard]] FsPoint fs_linear_response(const HamiltonianFamily& family, double x,
                                         const FidelityOptions& options = {});

/// FS of the TFIM with respect to the longitudinal field h at h = 0, as a
/// function of lambda. Only the paramagnetic side lambda > 1 is accepted.
[[nodiscard]] FsPoint fs_h_driven(int sites, double lambda, const FidelityOptions& options = {});

/// Dispatches on `method` for a point of a model family.
[[nodiscard]] FsPoint fs_evaluate(const HamiltonianFamily& family, double x, FsMethod method,
                                  const FidelityOptions& options = {});

}  // namespace critx
