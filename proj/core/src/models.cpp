// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/models.hpp"

#include <bit>
#include <limits>
#include <string>

#include "critx/error.hpp"
#include "critx/momentum.hpp"

namespace critx {

namespace {

void check_lengths(std::size_t dim, std::span<const double> in, std::span<double> out) {
  if (in.size() != dim || out.size() != dim) {
    throw DomainError("vector length " + std::to_string(in.size()) + "/" +
                      std::to_string(out.size()) + " does not match dimension " +
                      std::to_string(dim));
  }
}

AhmLattice::HopTable build_hops(const SpinSectorBasis& sector, BoundaryCondition bc) {
  AhmLattice::HopTable table;
  const int L = sector.sites();
  table.offsets.reserve(sector.size() + 1);
  table.offsets.push_back(0);
  for (const Word w : sector.words()) {
    for (int j = 0; j < L; ++j) {
      const int k = (j + 1) % L;
      for (const auto& [from, to] : {std::pair{j, k}, std::pair{k, j}}) {
        if (auto hop = apply_hop(w, from, to, L, bc)) {
          table.hops.push_back({static_cast<std::uint32_t>(sector.rank(hop->word)),
                                -static_cast<double>(hop->sign)});
        }
      }
    }
    table.offsets.push_back(table.hops.size());
  }
  return table;
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  return kind == ModelKind::ahm ? "ahm" : "tfim";
}

std::string_view to_string(DrivingTag tag) noexcept {
  switch (tag) {
    case DrivingTag::ahm_down_hop: return "ahm_down_hop";
    case DrivingTag::tfim_x_sum: return "tfim_x_sum";
    case DrivingTag::tfim_z_sum: return "tfim_z_sum";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "ahm" || text == "AHM") return ModelKind::ahm;
  if (text == "tfim" || text == "TFIM") return ModelKind::tfim;
  throw DomainError("unknown model kind '" + std::string(text) + "'");
}

DrivingTag parse_driving_tag(std::string_view text) {
  if (text == "ahm_down_hop") return DrivingTag::ahm_down_hop;
  if (text == "tfim_x_sum") return DrivingTag::tfim_x_sum;
  if (text == "tfim_z_sum") return DrivingTag::tfim_z_sum;
  throw DomainError("unknown driving tag '" + std::string(text) + "'");
}

std::string_view to_string(BasisKind kind) noexcept {
  return kind == BasisKind::product ? "product" : "momentum_zero";
}

BasisKind parse_basis_kind(std::string_view text) {
  if (text == "product") return BasisKind::product;
  if (text == "momentum_zero" || text == "k0") return BasisKind::momentum_zero;
  throw DomainError("unknown basis kind '" + std::string(text) + "'");
}

ModelParams ModelParams::ahm(int sites, double t, double U, int n_up, int n_dn) {
  return ahm(sites, t, U, n_up, n_dn, select_bc(n_up + n_dn));
}

ModelParams ModelParams::ahm(int sites, double t, double U, int n_up, int n_dn,
                             BoundaryCondition bc) {
  ModelParams p;
  p.kind = ModelKind::ahm;
  p.sites = sites;
  p.t = t;
  p.U = U;
  p.n_up = n_up;
  p.n_dn = n_dn;
  p.bc = bc;
  p.validate();
  return p;
}

ModelParams ModelParams::tfim(int sites, double lambda, double h) {
  ModelParams p;
  p.kind = ModelKind::tfim;
  p.sites = sites;
  p.lambda = lambda;
  p.h = h;
  p.validate();
  return p;
}

void ModelParams::validate() const {
  if (sites < 3) throw DomainError("ring models need at least 3 sites");
  if (kind == ModelKind::ahm) {
    if (sites > kMaxSites) throw DomainError("AHM supports at most 63 sites");
    if (n_up < 0 || n_up > sites || n_dn < 0 || n_dn > sites) {
      throw DomainError("AHM particle counts must lie in [0, L]");
    }
    if (!(t >= 0.0)) throw DomainError("AHM hopping ratio t must be >= 0");
  } else {
    if (basis != BasisKind::product) throw DomainError("TFIM uses the product basis only");
    if (sites > kMaxTfimSites) throw DomainError("TFIM full basis limited to 30 sites");
    if (!(lambda >= 0.0)) throw DomainError("TFIM transverse field must be >= 0");
  }
}

std::size_t ModelParams::dimension() const {
  if (kind == ModelKind::ahm) {
    if (basis == BasisKind::momentum_zero) return MomentumLattice(sites, n_up, n_dn, bc).size();
    return binomial(sites, n_up) * binomial(sites, n_dn);
  }
  return std::size_t{1} << sites;
}

bool compatible(ModelKind kind, DrivingTag tag) noexcept {
  return (kind == ModelKind::ahm) == (tag == DrivingTag::ahm_down_hop);
}

double driving_value(const ModelParams& p, DrivingTag tag) {
  if (!compatible(p.kind, tag)) throw DomainError("driving tag incompatible with model");
  switch (tag) {
    case DrivingTag::ahm_down_hop: return p.t;
    case DrivingTag::tfim_x_sum: return p.lambda;
    case DrivingTag::tfim_z_sum: return p.h;
  }
  return 0.0;
}

ModelParams with_driving(ModelParams p, DrivingTag tag, double value) {
  if (!compatible(p.kind, tag)) throw DomainError("driving tag incompatible with model");
  switch (tag) {
    case DrivingTag::ahm_down_hop: p.t = value; break;
    case DrivingTag::tfim_x_sum: p.lambda = value; break;
    case DrivingTag::tfim_z_sum: p.h = value; break;
  }
  p.validate();
  return p;
}

LinearMap Hamiltonian::as_map() const {
  return [this](std::span<const double> in, std::span<double> out) { apply(in, out); };
}

LinearMap Hamiltonian::driving_map(DrivingTag tag) const {
  if (!compatible(params().kind, tag)) throw DomainError("driving tag incompatible with model");
  return [this, tag](std::span<const double> in, std::span<double> out) {
    apply_driving(tag, in, out);
  };
}

// ---------------------------------------------------------------------------
// AHM

AhmLattice::AhmLattice(int sites, int n_up, int n_dn, BoundaryCondition bc)
    : basis_(sites, n_up, n_dn), bc_(bc) {
  if (sites < 3) throw DomainError("ring models need at least 3 sites");
  if (basis_.up().size() > std::numeric_limits<std::uint32_t>::max() ||
      basis_.dn().size() > std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("species sector too large for 32-bit hop targets");
  }
  up_hops_ = build_hops(basis_.up(), bc);
  dn_hops_ = build_hops(basis_.dn(), bc);
}

AhmHamiltonian::AhmHamiltonian(const ModelParams& p)
    : AhmHamiltonian(std::make_shared<const AhmLattice>(p.sites, p.n_up, p.n_dn, p.bc), p) {}

AhmHamiltonian::AhmHamiltonian(std::shared_ptr<const AhmLattice> lattice, const ModelParams& p)
    : lattice_(std::move(lattice)), params_(p) {
  params_.validate();
  if (p.kind != ModelKind::ahm) throw DomainError("AhmHamiltonian needs AHM parameters");
  const auto& b = lattice_->basis();
  if (b.sites() != p.sites || b.up().particles() != p.n_up || b.dn().particles() != p.n_dn ||
      lattice_->bc() != p.bc) {
    throw DomainError("lattice does not match AHM parameters");
  }
}

void AhmHamiltonian::accumulate(std::span<const double> in, std::span<double> out, double t_up,
                                double t_dn, double U) const {
  const auto& basis = lattice_->basis();
  const auto& up = basis.up();
  const auto& dn = basis.dn();
  const std::size_t n_dn = dn.size();
  const auto& up_hops = lattice_->up_hops();
  const auto& dn_hops = lattice_->dn_hops();

  // Each output element is a fixed-order sum over its own row, so the result
  // does not depend on how rows are scheduled.
  for (std::size_t iu = 0; iu < up.size(); ++iu) {
    double* row = out.data() + iu * n_dn;
    const double* self = in.data() + iu * n_dn;
    const Word wu = up[iu];
    if (U != 0.0) {
      for (std::size_t id = 0; id < n_dn; ++id) {
        row[id] = U * std::popcount(wu & dn[id]) * self[id];
      }
    } else {
      for (std::size_t id = 0; id < n_dn; ++id) row[id] = 0.0;
    }
    if (t_up != 0.0) {
      for (const auto& hop : up_hops.from(iu)) {
        const double a = t_up * hop.amplitude;
        const double* src = in.data() + std::size_t{hop.target} * n_dn;
        for (std::size_t id = 0; id < n_dn; ++id) row[id] += a * src[id];
      }
    }
    if (t_dn != 0.0) {
      for (std::size_t id = 0; id < n_dn; ++id) {
        double acc = 0.0;
        for (const auto& hop : dn_hops.from(id)) acc += hop.amplitude * self[hop.target];
        row[id] += t_dn * acc;
      }
    }
  }
}

void AhmHamiltonian::apply(std::span<const double> in, std::span<double> out) const {
  check_lengths(dimension(), in, out);
  accumulate(in, out, 1.0, params_.t, params_.U);
}

void AhmHamiltonian::apply_driving(DrivingTag tag, std::span<const double> in,
                                   std::span<double> out) const {
  if (tag != DrivingTag::ahm_down_hop) throw DomainError("driving tag incompatible with AHM");
  check_lengths(dimension(), in, out);
  accumulate(in, out, 0.0, 1.0, 0.0);
}

// ---------------------------------------------------------------------------
// TFIM

TfimHamiltonian::TfimHamiltonian(const ModelParams& p) : params_(p) {
  if (p.kind != ModelKind::tfim) throw DomainError("TfimHamiltonian needs TFIM parameters");
  params_.validate();
}

void TfimHamiltonian::apply(std::span<const double> in, std::span<double> out) const {
  const std::size_t dim = dimension();
  check_lengths(dim, in, out);
  const int L = params_.sites;
  const Word full = (Word{1} << L) - 1;
  const double lambda = params_.lambda;
  const double h = params_.h;
  for (std::size_t s = 0; s < dim; ++s) {
    const Word w = s;
    const Word rotated = ((w >> 1) | (w << (L - 1))) & full;
    const int unlike = std::popcount(w ^ rotated);
    const double zz = static_cast<double>(L - 2 * unlike);
    const double z = static_cast<double>(2 * std::popcount(w) - L);
    double acc = (zz + h * z) * in[s];
    if (lambda != 0.0) {
      double flips = 0.0;
      for (int j = 0; j < L; ++j) flips += in[w ^ (Word{1} << j)];
      acc += lambda * flips;
    }
    out[s] = acc;
  }
}

void TfimHamiltonian::apply_driving(DrivingTag tag, std::span<const double> in,
                                    std::span<double> out) const {
  const std::size_t dim = dimension();
  check_lengths(dim, in, out);
  const int L = params_.sites;
  if (tag == DrivingTag::tfim_x_sum) {
    for (std::size_t s = 0; s < dim; ++s) {
      double flips = 0.0;
      for (int j = 0; j < L; ++j) flips += in[s ^ (std::size_t{1} << j)];
      out[s] = flips;
    }
  } else if (tag == DrivingTag::tfim_z_sum) {
    for (std::size_t s = 0; s < dim; ++s) {
      out[s] = static_cast<double>(2 * std::popcount(static_cast<Word>(s)) - L) * in[s];
    }
  } else {
    throw DomainError("driving tag incompatible with TFIM");
  }
}

// ---------------------------------------------------------------------------

std::unique_ptr<Hamiltonian> make_hamiltonian(const ModelParams& p) {
  p.validate();
  if (p.kind == ModelKind::ahm) {
    if (p.basis == BasisKind::momentum_zero) return std::make_unique<MomentumAhmHamiltonian>(p);
    return std::make_unique<AhmHamiltonian>(p);
  }
  return std::make_unique<TfimHamiltonian>(p);
}

HamiltonianFamily::HamiltonianFamily(const ModelParams& base, DrivingTag tag)
    : base_(base), tag_(tag) {
  base_.validate();
  if (!compatible(base.kind, tag)) throw DomainError("driving tag incompatible with model");
  if (base.kind == ModelKind::ahm && base.basis == BasisKind::momentum_zero) {
    momentum_ =
        std::make_shared<const MomentumLattice>(base.sites, base.n_up, base.n_dn, base.bc);
    dimension_ = momentum_->size();
  } else if (base.kind == ModelKind::ahm) {
    lattice_ = std::make_shared<const AhmLattice>(base.sites, base.n_up, base.n_dn, base.bc);
    dimension_ = lattice_->basis().size();
  } else {
    dimension_ = base.dimension();
  }
}

std::unique_ptr<Hamiltonian> HamiltonianFamily::at(double x) const {
  const ModelParams p = with_driving(base_, tag_, x);
  if (momentum_) return std::make_unique<MomentumAhmHamiltonian>(momentum_, p);
  if (lattice_) return std::make_unique<AhmHamiltonian>(lattice_, p);
  return std::make_unique<TfimHamiltonian>(p);
}

Vector apply_hamiltonian(const ModelParams& p, std::span<const double> in) {
  const auto H = make_hamiltonian(p);
  Vector out(H->dimension());
  H->apply(in, out);
  return out;
}

Vector apply_driving(const ModelParams& p, DrivingTag tag, std::span<const double> in) {
  const auto H = make_hamiltonian(p);
  Vector out(H->dimension());
  H->apply_driving(tag, in, out);
  return out;
}

}  // namespace critx
