// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file models.hpp
 * @brief Matrix-free Hamiltonians for the asymmetric Hubbard ring (AHM) and the
 *        transverse-field Ising ring (TFIM), plus their driving operators.
 *
 * AHM:  H = -sum_{j,delta,sigma} t_sigma c^dag_{j,sigma} c_{j+delta,sigma}
 *           + U sum_j n_{j,up} n_{j,dn},   with t_up = 1 and t_dn = t.
 * TFIM: H = sum_j [ s^z_j s^z_{j+1} + lambda s^x_j + h s^z_j ].
 *
 * Both are real symmetric in the chosen bases, so all vectors are real.
 */

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "critx/basis.hpp"

namespace critx {

using Vector = std::vector<double>;

/// y = A x for a real symmetric operator.
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

enum class ModelKind { ahm, tfim };

/// Which parameter derivative of H is being probed.
///   ahm_down_hop: dH/dt   = -sum_{j,delta} c^dag_{j,dn} c_{j+delta,dn}
///   tfim_x_sum:   dH/dlam = sum_j s^x_j
///   tfim_z_sum:   dH/dh   = sum_j s^z_j
enum class DrivingTag { ahm_down_hop, tfim_x_sum, tfim_z_sum };

/// AHM state space: the full (N_up, N_dn) product sector, or its zero-momentum
/// subspace (see momentum.hpp).
enum class BasisKind { product, momentum_zero };

[[nodiscard]] std::string_view to_string(ModelKind kind) noexcept;
[[nodiscard]] std::string_view to_string(DrivingTag tag) noexcept;
[[nodiscard]] ModelKind parse_model_kind(std::string_view text);
[[nodiscard]] DrivingTag parse_driving_tag(std::string_view text);
[[nodiscard]] std::string_view to_string(BasisKind kind) noexcept;
[[nodiscard]] BasisKind parse_basis_kind(std::string_view text);

struct ModelParams {
  ModelKind kind = ModelKind::ahm;
  int sites = 0;

  // AHM couplings, in units of t_up.
  double t = 1.0;
  double U = 0.0;
  int n_up = 0;
  int n_dn = 0;
  BoundaryCondition bc{};
  BasisKind basis = BasisKind::product;

  // TFIM couplings.
  double lambda = 0.0;
  double h = 0.0;

  /// AHM instance with the boundary condition picked by select_bc(n_up + n_dn).
  [[nodiscard]] static ModelParams ahm(int sites, double t, double U, int n_up, int n_dn);
  [[nodiscard]] static ModelParams ahm(int sites, double t, double U, int n_up, int n_dn,
                                       BoundaryCondition bc);
  [[nodiscard]] static ModelParams tfim(int sites, double lambda, double h = 0.0);

  /// Throws DomainError when an invariant is violated.
  void validate() const;

  /// Size of the state space. For the momentum basis this enumerates orbits.
  [[nodiscard]] std::size_t dimension() const;
};

[[nodiscard]] bool compatible(ModelKind kind, DrivingTag tag) noexcept;
[[nodiscard]] double driving_value(const ModelParams& p, DrivingTag tag);
[[nodiscard]] ModelParams with_driving(ModelParams p, DrivingTag tag, double value);

class MomentumLattice;

class Hamiltonian {
 public:
  virtual ~Hamiltonian() = default;

  [[nodiscard]] virtual const ModelParams& params() const noexcept = 0;
  [[nodiscard]] virtual std::size_t dimension() const noexcept = 0;

  /// out = H in. Both spans must have length dimension().
  virtual void apply(std::span<const double> in, std::span<double> out) const = 0;

  /// out = H_I in, where H(x + eps) = H(x) + eps H_I for the driving parameter x.
  virtual void apply_driving(DrivingTag tag, std::span<const double> in,
                             std::span<double> out) const = 0;

  [[nodiscard]] LinearMap as_map() const;
  [[nodiscard]] LinearMap driving_map(DrivingTag tag) const;
};

/// Basis and nearest-neighbour hop tables of one AHM sector. Independent of t
/// and U, so a sweep over couplings shares one lattice.
class AhmLattice {
 public:
  AhmLattice(int sites, int n_up, int n_dn, BoundaryCondition bc);

  struct Hop {
    std::uint32_t target;
    double amplitude;  // matrix element of -sum c^dag c, i.e. -(fermion sign)
  };

  /// Hops out of each word of one species, stored CSR-style.
  struct HopTable {
    std::vector<std::size_t> offsets;
    std::vector<Hop> hops;

    [[nodiscard]] std::span<const Hop> from(std::size_t i) const noexcept {
      return {hops.data() + offsets[i], hops.data() + offsets[i + 1]};
    }
  };

  [[nodiscard]] const ProductBasis& basis() const noexcept { return basis_; }
  [[nodiscard]] BoundaryCondition bc() const noexcept { return bc_; }
  [[nodiscard]] const HopTable& up_hops() const noexcept { return up_hops_; }
  [[nodiscard]] const HopTable& dn_hops() const noexcept { return dn_hops_; }

 private:
  ProductBasis basis_;
  BoundaryCondition bc_;
  HopTable up_hops_;
  HopTable dn_hops_;
};

class AhmHamiltonian final : public Hamiltonian {
 public:
  explicit AhmHamiltonian(const ModelParams& p);
  AhmHamiltonian(std::shared_ptr<const AhmLattice> lattice, const ModelParams& p);

  [[nodiscard]] const ModelParams& params() const noexcept override { return params_; }
  [[nodiscard]] std::size_t dimension() const noexcept override {
    return lattice_->basis().size();
  }
  [[nodiscard]] const AhmLattice& lattice() const noexcept { return *lattice_; }
  [[nodiscard]] std::shared_ptr<const AhmLattice> shared_lattice() const noexcept {
    return lattice_;
  }

  void apply(std::span<const double> in, std::span<double> out) const override;
  void apply_driving(DrivingTag tag, std::span<const double> in,
                     std::span<double> out) const override;

 private:
  void accumulate(std::span<const double> in, std::span<double> out, double t_up, double t_dn,
                  double U) const;

  std::shared_ptr<const AhmLattice> lattice_;
  ModelParams params_;
};

/// Full 2^L sigma^z product basis; bit j set means sigma^z_j = +1.
class TfimHamiltonian final : public Hamiltonian {
 public:
  explicit TfimHamiltonian(const ModelParams& p);

  [[nodiscard]] const ModelParams& params() const noexcept override { return params_; }
  [[nodiscard]] std::size_t dimension() const noexcept override { return std::size_t{1} << params_.sites; }

  void apply(std::span<const double> in, std::span<double> out) const override;
  void apply_driving(DrivingTag tag, std::span<const double> in,
                     std::span<double> out) const override;

 private:
  ModelParams params_;
};

/// Largest TFIM ring the full-product-basis code path accepts.
inline constexpr int kMaxTfimSites = 30;

[[nodiscard]] std::unique_ptr<Hamiltonian> make_hamiltonian(const ModelParams& p);

/// H(x) for one model as the driving parameter x varies. AHM instances share
/// one lattice across all x.
class HamiltonianFamily {
 public:
  HamiltonianFamily(const ModelParams& base, DrivingTag tag);

  [[nodiscard]] const ModelParams& base() const noexcept { return base_; }
  [[nodiscard]] DrivingTag tag() const noexcept { return tag_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::unique_ptr<Hamiltonian> at(double x) const;

 private:
  ModelParams base_;
  DrivingTag tag_;
  std::size_t dimension_ = 0;
  std::shared_ptr<const AhmLattice> lattice_;
  std::shared_ptr<const MomentumLattice> momentum_;
};

/// One-shot helpers that build the operator for `p` and apply it once.
[[nodiscard]] Vector apply_hamiltonian(const ModelParams& p, std::span<const double> in);
[[nodiscard]] Vector apply_driving(const ModelParams& p, DrivingTag tag,
                                   std::span<const double> in);

}  // namespace critx
