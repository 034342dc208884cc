// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file eigensolver.hpp
 * @brief Ground-state Lanczos, dense spectra for small operators, and the
 *        deflated solve (H - E0)^{-1} Q b used by linear-response FS.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "critx/models.hpp"

namespace critx {

struct LanczosOptions {
  double tol = 1e-10;           ///< bound on ||H psi - E0 psi||
  int max_iter = 20000;         ///< operator applications
  std::uint64_t seed = 20070424;
  int max_basis = 32;           ///< Krylov vectors kept before a thick restart
  std::size_t memory_budget = std::size_t{2} << 30;  ///< bytes for the Krylov basis
  double degeneracy_ratio = 1e-8;  ///< flag when gap < ratio * |E0|
  bool audit_orthogonality = false;  ///< measure basis orthogonality at exit (O(k^2 dim))
};

struct EigResult {
  double E0 = 0.0;
  Vector psi0;
  double residual = 0.0;
  /// E1 - E0 from the second Ritz value; +inf for one-dimensional problems.
  double gap_estimate = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
  bool near_degenerate = false;
  /// max |<v_i|v_j> - delta_ij| over the final Krylov basis; NaN unless audited.
  double orthogonality_loss = std::numeric_limits<double>::quiet_NaN();
};

/// Thick-restart Lanczos with full reorthogonalization. Deterministic for a
/// fixed seed. Throws ConvergenceError (carrying the best residual) if the
/// residual bound is not reached within max_iter applications.
[[nodiscard]] EigResult ground_state(const LinearMap& apply, std::size_t dim,
                                     const LanczosOptions& options = {});

inline constexpr std::size_t kDenseMaxDim = 4096;

/// All eigenpairs, energies ascending, eigenvectors stored column-major.
struct Spectrum {
  std::size_t dim = 0;
  Vector energies;
  Vector vectors;

  [[nodiscard]] std::span<const double> vector(std::size_t n) const {
    return {vectors.data() + n * dim, dim};
  }
};

/// Assembles H column by column and diagonalizes it. Refuses dim > max_dim.
[[nodiscard]] Spectrum dense_spectrum(const LinearMap& apply, std::size_t dim,
                                      std::size_t max_dim = kDenseMaxDim);

struct DeflatedSolveOptions {
  double tol = 1e-10;  ///< relative residual ||(H-E0)x - Qb|| / ||Qb||
  int max_iter = 20000;
};

struct DeflatedSolveResult {
  Vector x;
  double relative_residual = 0.0;
  int iterations = 0;
};

/// Solves (H - E0) x = Q b with Q = 1 - |psi0><psi0|, x orthogonal to psi0,
/// by conjugate gradients on the deflated subspace. When ||Q b|| <= tol ||b||
/// the solution is zero and the residual is reported relative to ||b||.
[[nodiscard]] DeflatedSolveResult deflated_solve(const LinearMap& apply, double E0,
                                                 std::span<const double> psi0,
                                                 std::span<const double> rhs,
                                                 const DeflatedSolveOptions& options = {});

// Small BLAS-1 helpers shared by the solvers and FS routines.
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double norm(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);

}  // namespace critx
