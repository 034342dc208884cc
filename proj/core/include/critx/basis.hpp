// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file basis.hpp
 * @brief Fixed-particle-number occupation bases for spinless fermion species.
 *
 * An occupation word is an unsigned 64-bit integer with bit j set when site j
 * is occupied. A SpinSectorBasis lists every L-bit word with exactly n set
 * bits in ascending numeric order; ranking is combinadic (colex), so no table
 * lookup is needed. Two independent species form a ProductBasis.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace critx {

using Word = std::uint64_t;

inline constexpr int kMaxSites = 63;

enum class BoundaryKind { periodic, antiperiodic };

struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::periodic;

  /// Phase picked up by a hop across the bond (L-1, 0).
  [[nodiscard]] constexpr int phase() const noexcept {
    return kind == BoundaryKind::periodic ? 1 : -1;
  }

  friend constexpr bool operator==(BoundaryCondition, BoundaryCondition) = default;
};

[[nodiscard]] std::string_view to_string(BoundaryKind kind) noexcept;
[[nodiscard]] BoundaryKind parse_boundary_kind(std::string_view text);

/// Boundary condition that avoids a ground-state level crossing for a ring
/// with `total_electrons` electrons: periodic for 4l+2, antiperiodic for 4l.
/// Odd counts are rejected.
[[nodiscard]] BoundaryCondition select_bc(int total_electrons);

/// Binomial coefficient C(n, k) for 0 <= n <= 64; zero when k is outside [0, n].
[[nodiscard]] std::uint64_t binomial(int n, int k);

class SpinSectorBasis {
 public:
  /// All L-bit words with n set bits. Requires 0 <= n <= L <= 63.
  SpinSectorBasis(int sites, int particles);

  [[nodiscard]] int sites() const noexcept { return sites_; }
  [[nodiscard]] int particles() const noexcept { return particles_; }
  [[nodiscard]] std::size_t size() const noexcept { return words_.size(); }
  [[nodiscard]] std::span<const Word> words() const noexcept { return words_; }
  [[nodiscard]] Word operator[](std::size_t i) const noexcept { return words_[i]; }

  /// Position of `word` in the ascending list. Throws DomainError if the
  /// word has the wrong popcount or sets bits beyond the lattice.
  [[nodiscard]] std::size_t rank(Word word) const;
  [[nodiscard]] Word unrank(std::size_t index) const;

 private:
  int sites_;
  int particles_;
  std::vector<Word> words_;
};

/// Convenience spelling of the SpinSectorBasis constructor.
[[nodiscard]] inline SpinSectorBasis enumerate_sector(int sites, int particles) {
  return SpinSectorBasis(sites, particles);
}

/// Up and down species on the same lattice. Composite index
/// i = i_up * dim(dn) + i_dn.
class ProductBasis {
 public:
  ProductBasis(int sites, int n_up, int n_dn);

  [[nodiscard]] const SpinSectorBasis& up() const noexcept { return up_; }
  [[nodiscard]] const SpinSectorBasis& dn() const noexcept { return dn_; }
  [[nodiscard]] int sites() const noexcept { return up_.sites(); }
  [[nodiscard]] std::size_t size() const noexcept { return up_.size() * dn_.size(); }

  [[nodiscard]] std::size_t index(std::size_t i_up, std::size_t i_dn) const noexcept {
    return i_up * dn_.size() + i_dn;
  }
  [[nodiscard]] std::size_t up_index(std::size_t i) const noexcept { return i / dn_.size(); }
  [[nodiscard]] std::size_t dn_index(std::size_t i) const noexcept { return i % dn_.size(); }

 private:
  SpinSectorBasis up_;
  SpinSectorBasis dn_;
};

struct HopResult {
  Word word;
  int sign;

  friend constexpr bool operator==(const HopResult&, const HopResult&) = default;
};

/// c^dagger_to c_from on an open site ordering: the sign counts occupied sites
/// strictly between `from` and `to`. Any two distinct sites in [0, 63] are
/// allowed. Returns nullopt when the source is empty or the target occupied.
[[nodiscard]] std::optional<HopResult> jordan_wigner_hop(Word word, int from, int to);

/// Nearest-neighbour hop on a ring of L sites. The hop across the bond
/// {L-1, 0} carries the string over sites 1..L-2 times the boundary phase.
/// Throws DomainError if from and to are not ring neighbours.
[[nodiscard]] std::optional<HopResult> apply_hop(Word word, int from, int to, int sites,
                                                 BoundaryCondition bc);

}  // namespace critx
