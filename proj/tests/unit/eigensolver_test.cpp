// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/eigensolver.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "critx/error.hpp"
#include "critx/models.hpp"

namespace critx {
namespace {

Vector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Vector v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Random symmetric matrix as a LinearMap.
struct DenseOperator {
  Eigen::MatrixXd M;
  explicit DenseOperator(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    M.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) M(i, j) = M(j, i) = d(rng);
  }
  LinearMap map() const {
    return [this](std::span<const double> in, std::span<double> out) {
      Eigen::Map<const Eigen::VectorXd> x(in.data(), static_cast<Eigen::Index>(in.size()));
      Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) = M * x;
    };
  }
};

TEST(GroundState, MatchesDenseSpectrum) {
  const std::vector<ModelParams> cases = {
      ModelParams::ahm(6, 0.3, 10.0, 2, 2), ModelParams::ahm(6, 0.9, 30.0, 3, 3),
      ModelParams::ahm(8, 0.5, 4.0, 2, 2), ModelParams::tfim(10, 0.7, 0.1),
      ModelParams::tfim(8, 1.5)};
  for (const auto& p : cases) {
    const auto H = make_hamiltonian(p);
    ASSERT_LE(H->dimension(), 2000u);
    const auto dense = dense_spectrum(H->as_map(), H->dimension());
    const auto gs = ground_state(H->as_map(), H->dimension());
    EXPECT_NEAR(gs.E0, dense.energies[0], 1e-10);
    EXPECT_NEAR(norm(gs.psi0), 1.0, 1e-12);
    EXPECT_LE(gs.residual, 1e-10);
    EXPECT_NEAR(gs.gap_estimate, dense.energies[1] - dense.energies[0], 1e-6);
  }
}

TEST(GroundState, FreeFermionEnergy) {
  const auto H = make_hamiltonian(ModelParams::ahm(4, 1.0, 0.0, 2, 2));
  const auto gs = ground_state(H->as_map(), H->dimension());
  EXPECT_NEAR(gs.E0, -4.0 * std::sqrt(2.0), 1e-10);
}

TEST(GroundState, DeterministicForFixedSeed) {
  const auto H = make_hamiltonian(ModelParams::ahm(9, 0.35, 30.0, 3, 3));
  const auto a = ground_state(H->as_map(), H->dimension());
  const auto b = ground_state(H->as_map(), H->dimension());
  EXPECT_EQ(a.E0, b.E0);
  EXPECT_EQ(a.psi0, b.psi0);
  EXPECT_EQ(a.seed, LanczosOptions{}.seed);
}

TEST(GroundState, VariationalBound) {
  const auto H = make_hamiltonian(ModelParams::ahm(6, 0.5, 10.0, 2, 2));
  const auto gs = ground_state(H->as_map(), H->dimension());
  for (int s = 0; s < 10; ++s) {
    auto v = random_vector(H->dimension(), s);
    scale(1.0 / norm(v), v);
    Vector hv(v.size());
    H->apply(v, hv);
    EXPECT_GE(dot(v, hv), gs.E0 - 1e-10);
  }
}

TEST(GroundState, OrthogonalityAudit) {
  const auto H = make_hamiltonian(ModelParams::ahm(9, 0.36, 30.0, 3, 3));
  LanczosOptions o;
  o.audit_orthogonality = true;
  const auto gs = ground_state(H->as_map(), H->dimension(), o);
  EXPECT_LE(gs.orthogonality_loss, 1e-8);
}

TEST(GroundState, ReportsNonConvergence) {
  const auto H = make_hamiltonian(ModelParams::ahm(9, 0.36, 30.0, 3, 3));
  LanczosOptions o;
  o.max_iter = 10;
  try {
    (void)ground_state(H->as_map(), H->dimension(), o);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.best_residual(), 1e-10);
    EXPECT_TRUE(std::isfinite(e.best_residual()));
  }
}

TEST(GroundState, FlagsNearDegeneracy) {
  // Two lowest levels split by 1e-12 relative to |E0|.
  const std::vector<double> diag = {-1.0, -1.0 + 1e-12, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0};
  const LinearMap H = [&](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < diag.size(); ++i) out[i] = diag[i] * in[i];
  };
  const auto gs = ground_state(H, diag.size());
  EXPECT_TRUE(gs.near_degenerate);
}

TEST(DenseSpectrum, TraceOrderAndOrthonormality) {
  const auto H = make_hamiltonian(ModelParams::ahm(6, 0.4, 3.0, 2, 2));
  const auto n = H->dimension();
  const auto spec = dense_spectrum(H->as_map(), n);
  double trace = 0.0;
  Vector e(n, 0.0), col(n);
  for (std::size_t i = 0; i < n; ++i) {
    e[i] = 1.0;
    H->apply(e, col);
    e[i] = 0.0;
    trace += col[i];
  }
  double sum = 0.0;
  for (double E : spec.energies) sum += E;
  EXPECT_NEAR(sum, trace, 1e-9);
  for (std::size_t i = 1; i < n; ++i) EXPECT_LE(spec.energies[i - 1], spec.energies[i]);
  for (std::size_t a = 0; a < n; a += 17) {
    for (std::size_t b = 0; b < n; b += 13) {
      EXPECT_NEAR(dot(spec.vector(a), spec.vector(b)), a == b ? 1.0 : 0.0, 1e-10);
    }
  }
}

TEST(DenseSpectrum, RefusesLargeDimension) {
  const auto H = make_hamiltonian(ModelParams::tfim(13, 1.0));
  EXPECT_THROW((void)dense_spectrum(H->as_map(), H->dimension()), DomainError);
}

TEST(DeflatedSolve, ResidualContractOnRandomOperators) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    DenseOperator op(500, seed);
    const auto spec = dense_spectrum(op.map(), 500, 500);
    const Vector psi0(spec.vector(0).begin(), spec.vector(0).end());
    const auto rhs = random_vector(500, seed + 10);
    const auto sol = deflated_solve(op.map(), spec.energies[0], psi0, rhs, {1e-10, 20000});
    EXPECT_LE(sol.relative_residual, 1e-10);
    EXPECT_LT(std::abs(dot(psi0, sol.x)), 1e-10);

    // Independent check of the residual.
    Vector qb = rhs;
    axpy(-dot(psi0, qb), psi0, qb);
    Vector ax(500);
    op.map()(sol.x, ax);
    axpy(-spec.energies[0], sol.x, ax);
    axpy(-1.0, qb, ax);
    EXPECT_LE(norm(ax), 2e-10 * norm(qb));
  }
}

TEST(DeflatedSolve, Linearity) {
  DenseOperator op(200, 7);
  const auto spec = dense_spectrum(op.map(), 200, 500);
  const Vector psi0(spec.vector(0).begin(), spec.vector(0).end());
  const auto rhs = random_vector(200, 8);
  Vector twice = rhs;
  scale(2.0, twice);
  const auto a = deflated_solve(op.map(), spec.energies[0], psi0, rhs);
  const auto b = deflated_solve(op.map(), spec.energies[0], psi0, twice);
  for (std::size_t i = 0; i < 200; ++i) EXPECT_NEAR(b.x[i], 2.0 * a.x[i], 1e-8 * norm(a.x));
}

TEST(DeflatedSolve, SpectralSumOnAhmSector) {
  const auto p = ModelParams::ahm(3, 0.5, 4.0, 1, 1);
  const auto H = make_hamiltonian(p);
  const auto spec = dense_spectrum(H->as_map(), H->dimension());
  const Vector psi0(spec.vector(0).begin(), spec.vector(0).end());
  Vector rhs(psi0.size());
  H->apply_driving(DrivingTag::ahm_down_hop, psi0, rhs);
  const auto sol = deflated_solve(H->as_map(), spec.energies[0], psi0, rhs);
  double chi = 0.0;
  for (std::size_t n = 1; n < spec.dim; ++n) {
    const double m = dot(spec.vector(n), rhs);
    chi += m * m / std::pow(spec.energies[n] - spec.energies[0], 2);
  }
  EXPECT_NEAR(dot(sol.x, sol.x), chi, 1e-8 * chi);
}

TEST(Blas, Helpers) {
  Vector a{1, 2, 3}, b{4, 5, 6};
  EXPECT_DOUBLE_EQ(dot(a, b), 32.0);
  EXPECT_DOUBLE_EQ(norm(Vector{3, 4}), 5.0);
  axpy(2.0, a, b);
  EXPECT_EQ(b, (Vector{6, 9, 12}));
  scale(0.5, b);
  EXPECT_EQ(b, (Vector{3, 4.5, 6}));
}

}  // namespace
}  // namespace critx
