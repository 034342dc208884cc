// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/eigensolver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>
#include <string>

#include "critx/error.hpp"

namespace critx {

namespace {

using ConstMap = Eigen::Map<const Eigen::VectorXd>;
using MutMap = Eigen::Map<Eigen::VectorXd>;

ConstMap view(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}
MutMap view(std::span<double> v) { return {v.data(), static_cast<Eigen::Index>(v.size())}; }

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) { return view(a).dot(view(b)); }

double norm(std::span<const double> a) { return view(a).norm(); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  view(y) += alpha * view(x);
}

void scale(double alpha, std::span<double> x) { view(x) *= alpha; }

namespace {

using Basis = Eigen::MatrixXd;  // one Krylov vector per column

constexpr Eigen::Index kRitzStride = 6;

std::span<double> column(Basis& V, Eigen::Index c) {
  return {V.col(c).data(), static_cast<std::size_t>(V.rows())};
}

void random_unit_vector(std::span<double> v, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& x : v) x = dist(rng);
  scale(1.0 / norm(v), v);
}

// Orthogonalizes w against the first `count` columns. The last `local`
// columns are removed first (the three-term part); then classical
// Gram-Schmidt over all columns, repeated once if that pass cancelled most of
// the remaining norm.
Eigen::VectorXd orthogonalize(const Basis& V, Eigen::Index count, std::span<double> w_span,
                              Eigen::Index local = 0) {
  MutMap w = view(w_span);
  Eigen::VectorXd coeff = Eigen::VectorXd::Zero(count);
  local = std::min(local, count);
  for (Eigen::Index i = count - local; i < count; ++i) {
    const double c = V.col(i).dot(w);
    w -= c * V.col(i);
    coeff(i) += c;
  }
  for (int pass = 0; pass < 2; ++pass) {
    const double before = w.norm();
    const Eigen::VectorXd c = V.leftCols(count).transpose() * w;
    w.noalias() -= V.leftCols(count) * c;
    coeff += c;
    if (w.norm() > 0.7 * before) break;
  }
  return coeff;
}

// V(:, 0..cols) <- V(:, 0..rows) * S(:, 0..cols), in place over row chunks.
void rotate_basis(Basis& V, Eigen::Index rows, const Eigen::MatrixXd& S, Eigen::Index cols) {
  constexpr Eigen::Index kChunk = 4096;
  const Eigen::MatrixXd R = S.topLeftCorner(rows, cols);
  Eigen::MatrixXd buffer;
  for (Eigen::Index start = 0; start < V.rows(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, V.rows() - start);
    buffer.noalias() = V.block(start, 0, len, rows) * R;
    V.block(start, 0, len, cols) = buffer;
  }
}

}  // namespace

EigResult ground_state(const LinearMap& apply, std::size_t dim, const LanczosOptions& options) {
  if (dim == 0) throw DomainError("ground_state: empty operator");
  if (!(options.tol > 0.0)) throw DomainError("ground_state: tolerance must be positive");
  if (options.max_iter < 1) throw DomainError("ground_state: max_iter must be positive");

  EigResult result;
  result.seed = options.seed;

  if (dim == 1) {
    Vector one{1.0};
    Vector h(1);
    apply(one, h);
    result.E0 = h[0];
    result.psi0 = std::move(one);
    result.gap_estimate = std::numeric_limits<double>::infinity();
    result.iterations = 1;
    return result;
  }

  // Krylov vectors plus w, psi and H psi must fit the memory budget.
  const std::size_t vector_bytes = dim * sizeof(double);
  const std::size_t affordable = options.memory_budget / vector_bytes;
  if (affordable < 8) {
    throw DomainError("ground_state: memory budget holds fewer than 8 vectors of dimension " +
                      std::to_string(dim));
  }
  std::size_t max_basis = std::min<std::size_t>(
      {static_cast<std::size_t>(std::max(options.max_basis, 4)), affordable - 4, dim});
  max_basis = std::max<std::size_t>(max_basis, 2);

  std::mt19937_64 rng(options.seed);
  const auto n = static_cast<Eigen::Index>(dim);
  Basis V(n, static_cast<Eigen::Index>(max_basis + 1));
  random_unit_vector(column(V, 0), rng);
  Eigen::Index k = 1;  // columns in use

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(max_basis + 1),
                                            static_cast<Eigen::Index>(max_basis + 1));
  Vector w(dim);
  Vector psi(dim);
  Vector hpsi(dim);
  int matvecs = 0;
  double best_residual = std::numeric_limits<double>::infinity();

  while (true) {
    const Eigen::Index j = k - 1;
    apply(column(V, j), w);
    ++matvecs;
    const Eigen::VectorXd coeff = orthogonalize(V, k, w, 2);
    T.col(j).head(k) = coeff;
    T.row(j).head(k) = coeff.transpose();
    const double beta = norm(w);

    // The Ritz problem is solved every few steps, and always before a restart.
    const bool full = static_cast<std::size_t>(k) >= max_basis;
    if (!full && k % kRitzStride != 0 && static_cast<std::size_t>(k) != dim &&
        beta > 1e-14 * std::max(1.0, std::abs(T(j, j)))) {
      view(column(V, k)) = view(std::span<const double>(w)) / beta;
      ++k;
      if (matvecs >= options.max_iter) {
        throw ConvergenceError("ground_state: no convergence after " + std::to_string(matvecs) +
                                   " operator applications (best residual " +
                                   std::to_string(best_residual) + ")",
                               best_residual);
      }
      continue;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(T.topLeftCorner(k, k));
    const auto& theta = ritz.eigenvalues();
    const auto& S = ritz.eigenvectors();
    const double estimate = std::abs(beta * S(k - 1, 0));
    const double scale_ref = std::max(1.0, std::abs(theta(0)));
    const bool invariant = beta <= 1e-14 * scale_ref;

    if (estimate <= 0.5 * options.tol || invariant || static_cast<std::size_t>(k) == dim) {
      MutMap p = view(std::span<double>(psi));
      p.noalias() = V.leftCols(k) * S.col(0);
      p /= p.norm();
      apply(psi, hpsi);
      ++matvecs;
      const double e0 = dot(psi, hpsi);
      axpy(-e0, psi, hpsi);
      const double residual = norm(hpsi);
      best_residual = std::min(best_residual, residual);
      if (residual <= options.tol) {
        result.E0 = e0;
        result.psi0 = std::move(psi);
        result.residual = residual;
        result.gap_estimate =
            k >= 2 ? theta(1) - theta(0) : std::numeric_limits<double>::infinity();
        result.iterations = matvecs;
        if (options.audit_orthogonality) {
          const Eigen::MatrixXd G =
              V.leftCols(k).transpose() * V.leftCols(k) - Eigen::MatrixXd::Identity(k, k);
          result.orthogonality_loss = G.cwiseAbs().maxCoeff();
        }
        result.near_degenerate = result.gap_estimate < options.degeneracy_ratio * std::abs(e0);
        if (result.near_degenerate) {
          std::clog << "critx: warning: near-degenerate ground state (gap estimate "
                    << result.gap_estimate << ", E0 " << e0 << ")\n";
        }
        return result;
      }
    } else {
      best_residual = std::min(best_residual, estimate);
    }

    if (matvecs >= options.max_iter) {
      throw ConvergenceError("ground_state: no convergence after " + std::to_string(matvecs) +
                                 " operator applications (best residual " +
                                 std::to_string(best_residual) + ")",
                             best_residual);
    }

    if (invariant) {
      // Exhausted an invariant subspace without meeting the tolerance: extend
      // with a fresh direction orthogonal to everything so far.
      if (static_cast<std::size_t>(k) == max_basis + 1 || static_cast<std::size_t>(k) == dim) {
        throw ConvergenceError("ground_state: invariant subspace without convergence",
                               best_residual);
      }
      auto fresh = column(V, k);
      random_unit_vector(fresh, rng);
      orthogonalize(V, k, fresh);
      scale(1.0 / norm(fresh), fresh);
      ++k;
      continue;
    }

    if (static_cast<std::size_t>(k) < max_basis) {
      view(column(V, k)) = view(std::span<const double>(w)) / beta;
      ++k;
      continue;
    }

    // Thick restart: keep the lowest half of the Ritz vectors and the current
    // residual direction.
    const Eigen::Index keep = std::max<Eigen::Index>(2, k / 2);
    rotate_basis(V, k, S, keep);
    view(column(V, keep)) = view(std::span<const double>(w)) / beta;
    T.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) T(i, i) = theta(i);
    k = keep + 1;
  }
}

Spectrum dense_spectrum(const LinearMap& apply, std::size_t dim, std::size_t max_dim) {
  if (dim == 0) throw DomainError("dense_spectrum: empty operator");
  if (dim > max_dim) {
    throw DomainError("dense_spectrum: dimension " + std::to_string(dim) + " exceeds limit " +
                      std::to_string(max_dim) + "; use ground_state for large operators");
  }
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd H(n, n);
  Vector unit(dim, 0.0);
  Vector column(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    unit[c] = 1.0;
    apply(unit, column);
    unit[c] = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
      H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = column[r];
    }
  }
  const Eigen::MatrixXd sym = 0.5 * (H + H.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("dense_spectrum: eigensolver failed", std::numeric_limits<double>::infinity());
  }
  Spectrum spec;
  spec.dim = dim;
  spec.energies.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  spec.vectors.assign(solver.eigenvectors().data(), solver.eigenvectors().data() + n * n);
  return spec;
}

DeflatedSolveResult deflated_solve(const LinearMap& apply, double E0, std::span<const double> psi0,
                                   std::span<const double> rhs,
                                   const DeflatedSolveOptions& options) {
  const std::size_t dim = psi0.size();
  if (rhs.size() != dim) throw DomainError("deflated_solve: rhs length mismatch");
  if (!(options.tol > 0.0)) throw DomainError("deflated_solve: tolerance must be positive");

  auto project = [&](std::span<double> v) { axpy(-dot(psi0, v), psi0, v); };
  Vector scratch(dim);
  auto op = [&](std::span<const double> in, std::span<double> out) {
    apply(in, out);
    axpy(-E0, in, out);
    project(out);
  };

  DeflatedSolveResult result;
  result.x.assign(dim, 0.0);
  Vector b(rhs.begin(), rhs.end());
  project(b);
  const double bnorm = norm(b);
  if (bnorm == 0.0) return result;
  // Q b below the tolerance relative to b: the remainder is ground-state noise.
  const double raw = norm(rhs);
  if (bnorm <= options.tol * raw) {
    result.relative_residual = bnorm / raw;
    return result;
  }

  Vector& x = result.x;
  Vector r = b;
  Vector p = r;
  Vector Ap(dim);
  double rr = dot(r, r);
  double best = 1.0;
  constexpr int kRefresh = 50;

  for (int it = 1; it <= options.max_iter; ++it) {
    op(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) {
      throw DegeneracyError(
          "deflated_solve: H - E0 is not positive on the deflated subspace (near-degenerate "
          "ground state); use the dense spectral path");
    }
    const double alpha = rr / pAp;
    axpy(alpha, p, x);
    axpy(-alpha, Ap, r);
    if (it % kRefresh == 0) {
      project(x);
      op(x, scratch);
      for (std::size_t i = 0; i < dim; ++i) r[i] = b[i] - scratch[i];
    }
    double rr_new = dot(r, r);
    double rel = std::sqrt(rr_new) / bnorm;
    if (rel <= options.tol) {
      project(x);
      op(x, scratch);
      for (std::size_t i = 0; i < dim; ++i) r[i] = b[i] - scratch[i];
      rr_new = dot(r, r);
      rel = std::sqrt(rr_new) / bnorm;
      if (rel <= options.tol) {
        result.relative_residual = rel;
        result.iterations = it;
        return result;
      }
      // Recurrence drifted; restart the search direction from the true residual.
      p = r;
      rr = rr_new;
      best = std::min(best, rel);
      continue;
    }
    best = std::min(best, rel);
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < dim; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
  }
  throw ConvergenceError("deflated_solve: stagnated at relative residual " +
                             std::to_string(best) +
                             " (possible near-degenerate ground state; use the dense spectral "
                             "path)",
                         best);
}

}  // namespace critx
