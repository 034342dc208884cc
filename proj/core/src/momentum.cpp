// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/momentum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "critx/error.hpp"

namespace critx {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

// T|w> = sign |rot(w)> for one species.
struct Rotation {
  std::vector<std::uint32_t> target;
  std::vector<std::int8_t> sign;
};

Rotation rotation_table(const SpinSectorBasis& sector, BoundaryCondition bc) {
  const int L = sector.sites();
  const Word mask = L == 64 ? ~Word{0} : (Word{1} << L) - 1;
  const int wrap_sign = static_cast<int>(bc.phase()) * ((sector.particles() - 1) % 2 ? -1 : 1);
  Rotation r;
  r.target.resize(sector.size());
  r.sign.resize(sector.size());
  for (std::size_t i = 0; i < sector.size(); ++i) {
    const Word w = sector[i];
    const bool wraps = (w >> (L - 1)) & 1U;
    r.target[i] = static_cast<std::uint32_t>(sector.rank(((w << 1) | (w >> (L - 1))) & mask));
    r.sign[i] = static_cast<std::int8_t>(wraps ? wrap_sign : 1);
  }
  return r;
}

AhmLattice::HopTable species_hops(const SpinSectorBasis& sector, BoundaryCondition bc) {
  AhmLattice::HopTable table;
  const int L = sector.sites();
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

MomentumLattice::MomentumLattice(int sites, int n_up, int n_dn, BoundaryCondition bc)
    : product_(sites, n_up, n_dn), bc_(bc) {
  if (sites < 3) throw DomainError("ring models need at least 3 sites");
  const auto& up = product_.up();
  const auto& dn = product_.dn();
  const std::size_t n_dn_states = dn.size();
  const std::size_t total = product_.size();
  if (total >= kNone) throw DomainError("product sector too large for 32-bit indices");

  const auto rot_up = rotation_table(up, bc);
  const auto rot_dn = rotation_table(dn, bc);

  // For every product state: index of its representative (kNone when the
  // orbit has no K = 0 component) and the sign zeta with |x> = zeta T^j |s>.
  std::vector<std::uint32_t> rep_of(total, kNone);
  std::vector<std::int8_t> zeta(total, 0);
  std::vector<std::size_t> orbit;
  std::vector<std::int8_t> orbit_sign;
  for (std::size_t s = 0; s < total; ++s) {
    if (zeta[s] != 0) continue;
    orbit.assign(1, s);
    orbit_sign.assign(1, 1);
    std::size_t iu = s / n_dn_states;
    std::size_t id = s % n_dn_states;
    int sign = 1;
    while (true) {
      sign *= rot_up.sign[iu] * rot_dn.sign[id];
      iu = rot_up.target[iu];
      id = rot_dn.target[id];
      const std::size_t x = iu * n_dn_states + id;
      if (x == s) break;
      orbit.push_back(x);
      orbit_sign.push_back(static_cast<std::int8_t>(sign));
    }
    const bool keep = sign == 1;
    const auto index = static_cast<std::uint32_t>(representatives_.size());
    for (std::size_t j = 0; j < orbit.size(); ++j) {
      zeta[orbit[j]] = orbit_sign[j];
      if (keep) rep_of[orbit[j]] = index;
    }
    if (keep) {
      representatives_.push_back(s);
      periods_.push_back(static_cast<int>(orbit.size()));
    }
  }

  docc_.reserve(representatives_.size());
  for (const std::size_t s : representatives_) {
    docc_.push_back(static_cast<std::uint8_t>(
        std::popcount(up[s / n_dn_states] & dn[s % n_dn_states])));
  }

  // Column a of the hop matrix is H|r_a> = sum_x h_x zeta_x sqrt(P_a / P_b) |r_b>;
  // the matrix is symmetric, so columns are stored as rows.
  const auto build = [&](const AhmLattice::HopTable& hops, bool is_up) {
    Csr m;
    m.offsets.reserve(representatives_.size() + 1);
    m.offsets.push_back(0);
    std::vector<std::pair<std::uint32_t, double>> row;
    for (std::size_t a = 0; a < representatives_.size(); ++a) {
      const std::size_t s = representatives_[a];
      const std::size_t iu = s / n_dn_states;
      const std::size_t id = s % n_dn_states;
      const double pa = periods_[a];
      row.clear();
      for (const auto& hop : hops.from(is_up ? iu : id)) {
        const std::size_t x = is_up ? std::size_t{hop.target} * n_dn_states + id
                                    : iu * n_dn_states + hop.target;
        const std::uint32_t b = rep_of[x];
        if (b == kNone) continue;
        row.emplace_back(b, hop.amplitude * zeta[x] * std::sqrt(pa / periods_[b]));
      }
      std::sort(row.begin(), row.end(),
                [](const auto& l, const auto& r) { return l.first < r.first; });
      for (std::size_t i = 0; i < row.size();) {
        double v = 0.0;
        std::size_t j = i;
        for (; j < row.size() && row[j].first == row[i].first; ++j) v += row[j].second;
        if (v != 0.0) {
          m.columns.push_back(row[i].first);
          m.values.push_back(v);
        }
        i = j;
      }
      m.offsets.push_back(m.columns.size());
    }
    return m;
  };
  up_ = build(species_hops(up, bc), true);
  dn_ = build(species_hops(dn, bc), false);
}

Vector MomentumLattice::expand(std::span<const double> coefficients) const {
  if (coefficients.size() != size()) throw DomainError("expand: coefficient length mismatch");
  const auto& up = product_.up();
  const auto& dn = product_.dn();
  const auto rot_up = rotation_table(up, bc_);
  const auto rot_dn = rotation_table(dn, bc_);
  const std::size_t n_dn_states = dn.size();
  Vector out(product_.size(), 0.0);
  for (std::size_t a = 0; a < size(); ++a) {
    // |r_a> = P^-1/2 sum_{j<P} T^j |s_a>.
    const double amp = coefficients[a] / std::sqrt(static_cast<double>(periods_[a]));
    std::size_t iu = representatives_[a] / n_dn_states;
    std::size_t id = representatives_[a] % n_dn_states;
    int sign = 1;
    for (int j = 0; j < periods_[a]; ++j) {
      out[iu * n_dn_states + id] += sign * amp;
      sign *= rot_up.sign[iu] * rot_dn.sign[id];
      iu = rot_up.target[iu];
      id = rot_dn.target[id];
    }
  }
  return out;
}

MomentumAhmHamiltonian::MomentumAhmHamiltonian(const ModelParams& p)
    : MomentumAhmHamiltonian(
          std::make_shared<const MomentumLattice>(p.sites, p.n_up, p.n_dn, p.bc), p) {}

MomentumAhmHamiltonian::MomentumAhmHamiltonian(std::shared_ptr<const MomentumLattice> lattice,
                                               const ModelParams& p)
    : lattice_(std::move(lattice)), params_(p) {
  params_.validate();
  if (p.kind != ModelKind::ahm) throw DomainError("MomentumAhmHamiltonian needs AHM parameters");
  const auto& b = lattice_->product();
  if (b.sites() != p.sites || b.up().particles() != p.n_up || b.dn().particles() != p.n_dn ||
      lattice_->bc() != p.bc) {
    throw DomainError("lattice does not match AHM parameters");
  }
}

void MomentumAhmHamiltonian::apply(std::span<const double> in, std::span<double> out) const {
  const std::size_t dim = dimension();
  if (in.size() != dim || out.size() != dim) throw DomainError("vector length mismatch");
  const auto& up = lattice_->up_hops();
  const auto& dn = lattice_->dn_hops();
  const auto docc = lattice_->double_occupancy();
  const double U = params_.U;
  const double t = params_.t;
  for (std::size_t a = 0; a < dim; ++a) {
    double hu = 0.0;
    for (std::size_t e = up.offsets[a]; e < up.offsets[a + 1]; ++e) {
      hu += up.values[e] * in[up.columns[e]];
    }
    double hd = 0.0;
    for (std::size_t e = dn.offsets[a]; e < dn.offsets[a + 1]; ++e) {
      hd += dn.values[e] * in[dn.columns[e]];
    }
    out[a] = U * docc[a] * in[a] + hu + t * hd;
  }
}

void MomentumAhmHamiltonian::apply_driving(DrivingTag tag, std::span<const double> in,
                                           std::span<double> out) const {
  if (tag != DrivingTag::ahm_down_hop) throw DomainError("driving tag incompatible with AHM");
  const std::size_t dim = dimension();
  if (in.size() != dim || out.size() != dim) throw DomainError("vector length mismatch");
  const auto& dn = lattice_->dn_hops();
  for (std::size_t a = 0; a < dim; ++a) {
    double hd = 0.0;
    for (std::size_t e = dn.offsets[a]; e < dn.offsets[a + 1]; ++e) {
      hd += dn.values[e] * in[dn.columns[e]];
    }
    out[a] = hd;
  }
}

}  // namespace critx
