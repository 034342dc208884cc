// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file momentum.hpp
 * @brief Zero-momentum sector of the AHM ring.
 *
 * The lattice translation T c_j T^-1 = c_{j+1}, with c_L = phase * c_0 from
 * the boundary condition, commutes with both hopping terms and with the
 * interaction, so the ground state and the driving operator stay in one
 * momentum sector. For the boundary rule of select_bc that sector is K = 0.
 * Basis states are |r> = (sqrt(P)/L) sum_j T^j |s> over a representative
 * product state s of period P; orbits whose sign after P steps is -1 have no
 * K = 0 component and are dropped.
 */
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "critx/basis.hpp"
#include "critx/models.hpp"

namespace critx {

class MomentumLattice {
 public:
  MomentumLattice(int sites, int n_up, int n_dn, BoundaryCondition bc);

  /// Sparse symmetric matrix in CSR form.
  struct Csr {
    std::vector<std::size_t> offsets;
    std::vector<std::uint32_t> columns;
    std::vector<double> values;
  };

  [[nodiscard]] const ProductBasis& product() const noexcept { return product_; }
  [[nodiscard]] BoundaryCondition bc() const noexcept { return bc_; }
  [[nodiscard]] std::size_t size() const noexcept { return representatives_.size(); }

  /// Product index of each representative.
  [[nodiscard]] std::span<const std::size_t> representatives() const noexcept {
    return representatives_;
  }
  [[nodiscard]] std::span<const int> periods() const noexcept { return periods_; }
  /// Number of doubly occupied sites of each basis state.
  [[nodiscard]] std::span<const std::uint8_t> double_occupancy() const noexcept {
    return docc_;
  }
  [[nodiscard]] const Csr& up_hops() const noexcept { return up_; }
  [[nodiscard]] const Csr& dn_hops() const noexcept { return dn_; }

  /// Product-basis vector of a K = 0 state, for cross-checks.
  [[nodiscard]] Vector expand(std::span<const double> coefficients) const;

 private:
  ProductBasis product_;
  BoundaryCondition bc_;
  std::vector<std::size_t> representatives_;
  std::vector<int> periods_;
  std::vector<std::uint8_t> docc_;
  Csr up_;
  Csr dn_;
};

/// AHM restricted to the K = 0 sector; same params() as the product-basis operator.
class MomentumAhmHamiltonian final : public Hamiltonian {
 public:
  explicit MomentumAhmHamiltonian(const ModelParams& p);
  MomentumAhmHamiltonian(std::shared_ptr<const MomentumLattice> lattice, const ModelParams& p);

  [[nodiscard]] const ModelParams& params() const noexcept override { return params_; }
  [[nodiscard]] std::size_t dimension() const noexcept override { return lattice_->size(); }
  [[nodiscard]] const MomentumLattice& lattice() const noexcept { return *lattice_; }

  void apply(std::span<const double> in, std::span<double> out) const override;
  void apply_driving(DrivingTag tag, std::span<const double> in,
                     std::span<double> out) const override;

 private:
  std::shared_ptr<const MomentumLattice> lattice_;
  ModelParams params_;
};

}  // namespace critx
