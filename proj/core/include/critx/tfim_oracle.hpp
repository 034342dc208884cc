// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file tfim_oracle.hpp
 * @brief Closed-form lambda-driven FS of the transverse-field Ising ring at h = 0.
 *
 * After a sublattice rotation the ring maps onto the ferromagnetic chain, and a
 * Jordan-Wigner transform reduces the even-parity ground state to independent
 * (k, -k) pairs with Bogoliubov angle theta_k = atan2(sin k, lambda - cos k):
 *
 *   chi(lambda) = sum_{k>0} (1/4) (d theta_k / d lambda)^2
 *               = sum_{k>0} sin^2 k / (4 (1 + lambda^2 - 2 lambda cos k)^2),
 *
 * with k = (2m+1) pi / L. See docs/tfim_free_fermion.md for the derivation.
 */

#pragma once

#include <string>

#include "critx/models.hpp"

namespace critx {

/// Antiperiodic momenta (2m+1) pi / L, m = 0..L-1, of the even-parity sector.
struct ModeSet {
  int sites = 0;
  Vector momenta;

  /// The k in (0, pi) half of the set; each is paired with -k.
  [[nodiscard]] Vector positive() const;
};

/// Requires an even L >= 2 (the sublattice rotation needs a bipartite ring).
[[nodiscard]] ModeSet mode_set(int sites);

/// Bogoliubov angle of mode k at field lambda.
[[nodiscard]] double bogoliubov_angle(double k, double lambda);

/// Exact FS with respect to lambda. Requires lambda > 0 and even L.
[[nodiscard]] double fs_exact(double lambda, int sites);

/// Same sum taken over all L momenta and halved; equals fs_exact by k -> -k symmetry.
[[nodiscard]] double fs_exact_full_sum(double lambda, int sites);

struct DensityExponent {
  double slope = 0.0;           ///< d ln(chi/L) / d ln|lambda - 1|
  double slope_stderr = 0.0;
  double r_squared = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  int sites = 0;
  int samples = 0;
  /// True when the slope is more than 0.05 away from -1 (outside the
  /// critical regime).
  bool crossover = false;
};

/// Log-log slope of chi/L versus |lambda - 1| on [lambda_lo, lambda_hi], which
/// must lie on one side of 1 and keep |lambda - 1| >= 4 pi / L.
[[nodiscard]] DensityExponent fs_density_exponent(double lambda_lo, double lambda_hi,
                                                  int sites = 4096, int samples = 41);

}  // namespace critx
