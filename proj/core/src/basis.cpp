// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/basis.hpp"

#include <array>
#include <bit>
#include <string>

#include "critx/error.hpp"

namespace critx {

namespace {

using BinomialTable = std::array<std::array<std::uint64_t, 65>, 65>;

constexpr BinomialTable make_binomial_table() {
  BinomialTable table{};
  for (int n = 0; n <= 64; ++n) {
    table[n][0] = 1;
    for (int k = 1; k <= n; ++k) {
      table[n][k] = table[n - 1][k - 1] + (k <= n - 1 ? table[n - 1][k] : 0);
    }
  }
  return table;
}

constexpr BinomialTable kBinomial = make_binomial_table();

// Next word with the same popcount (Gosper's hack).
constexpr Word next_combination(Word w) noexcept {
  const Word lowest = w & (~w + 1);
  const Word ripple = w + lowest;
  return ripple | (((w ^ ripple) >> 2) / lowest);
}

constexpr Word mask_between(int lo, int hi) noexcept {
  // sites lo+1 .. hi-1
  if (hi - lo < 2) return 0;
  const Word upto_hi = (Word{1} << hi) - 1;
  const Word upto_lo = (Word{1} << (lo + 1)) - 1;
  return upto_hi & ~upto_lo;
}

}  // namespace

std::string_view to_string(BoundaryKind kind) noexcept {
  return kind == BoundaryKind::periodic ? "periodic" : "antiperiodic";
}

BoundaryKind parse_boundary_kind(std::string_view text) {
  if (text == "periodic") return BoundaryKind::periodic;
  if (text == "antiperiodic") return BoundaryKind::antiperiodic;
  throw DomainError("unknown boundary kind '" + std::string(text) + "'");
}

BoundaryCondition select_bc(int total_electrons) {
  if (total_electrons < 0 || total_electrons % 2 != 0) {
    throw DomainError("boundary rule needs an even electron count, got " +
                      std::to_string(total_electrons));
  }
  return {total_electrons % 4 == 2 ? BoundaryKind::periodic : BoundaryKind::antiperiodic};
}

std::uint64_t binomial(int n, int k) {
  if (n < 0 || n > 64) throw DomainError("binomial: n out of range");
  if (k < 0 || k > n) return 0;
  return kBinomial[n][k];
}

SpinSectorBasis::SpinSectorBasis(int sites, int particles) : sites_(sites), particles_(particles) {
  if (sites < 0 || sites > kMaxSites) {
    throw DomainError("site count must lie in [0, 63], got " + std::to_string(sites));
  }
  if (particles < 0 || particles > sites) {
    throw DomainError("particle count " + std::to_string(particles) + " outside [0, " +
                      std::to_string(sites) + "]");
  }
  const auto count = kBinomial[sites][particles];
  words_.reserve(count);
  if (particles == 0) {
    words_.push_back(0);
    return;
  }
  Word w = (Word{1} << particles) - 1;
  for (std::uint64_t i = 0; i < count; ++i) {
    words_.push_back(w);
    if (i + 1 < count) w = next_combination(w);
  }
}

std::size_t SpinSectorBasis::rank(Word word) const {
  if (std::popcount(word) != particles_) {
    throw DomainError("word popcount " + std::to_string(std::popcount(word)) +
                      " does not match sector particle count " + std::to_string(particles_));
  }
  if (sites_ < 64 && (word >> sites_) != 0) {
    throw DomainError("word has bits beyond site " + std::to_string(sites_ - 1));
  }
  std::size_t r = 0;
  int k = 1;
  while (word != 0) {
    const int pos = std::countr_zero(word);
    r += kBinomial[pos][k];
    ++k;
    word &= word - 1;
  }
  return r;
}

Word SpinSectorBasis::unrank(std::size_t index) const {
  if (index >= words_.size()) {
    throw DomainError("index " + std::to_string(index) + " outside sector of dimension " +
                      std::to_string(words_.size()));
  }
  Word w = 0;
  std::uint64_t rest = index;
  for (int k = particles_; k >= 1; --k) {
    int pos = k - 1;
    while (pos + 1 < sites_ && kBinomial[pos + 1][k] <= rest) ++pos;
    w |= Word{1} << pos;
    rest -= kBinomial[pos][k];
  }
  return w;
}

ProductBasis::ProductBasis(int sites, int n_up, int n_dn) : up_(sites, n_up), dn_(sites, n_dn) {}

std::optional<HopResult> jordan_wigner_hop(Word word, int from, int to) {
  if (from < 0 || to < 0 || from > kMaxSites || to > kMaxSites || from == to) {
    throw DomainError("hop needs two distinct sites in [0, 63]");
  }
  const Word src = Word{1} << from;
  const Word dst = Word{1} << to;
  if ((word & src) == 0 || (word & dst) != 0) return std::nullopt;
  const int lo = from < to ? from : to;
  const int hi = from < to ? to : from;
  const int crossed = std::popcount(word & mask_between(lo, hi));
  return HopResult{(word & ~src) | dst, (crossed & 1) ? -1 : 1};
}

std::optional<HopResult> apply_hop(Word word, int from, int to, int sites, BoundaryCondition bc) {
  if (sites < 2 || sites > kMaxSites) throw DomainError("ring size out of range");
  if (from < 0 || to < 0 || from >= sites || to >= sites || from == to) {
    throw DomainError("hop sites outside the ring");
  }
  const int d = (to - from + sites) % sites;
  if (d != 1 && d != sites - 1) {
    throw DomainError("sites " + std::to_string(from) + " and " + std::to_string(to) +
                      " are not ring neighbours");
  }
  auto hop = jordan_wigner_hop(word, from, to);
  if (hop && (from + to == sites - 1) && (from == 0 || to == 0) && sites > 2) {
    hop->sign *= bc.phase();
  }
  return hop;
}

}  // namespace critx
