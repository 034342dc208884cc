// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/tfim_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "critx/error.hpp"
#include "critx/fidelity.hpp"
#include "critx/scaling.hpp"

namespace critx {
namespace {

double ed_chi(int sites, double lambda) {
  HamiltonianFamily f(ModelParams::tfim(sites, lambda), DrivingTag::tfim_x_sum);
  return fs_linear_response(f, lambda).chi;
}

// Maximum of the oracle over lambda by golden-section search.
double oracle_peak(int sites) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.5, b = 1.5;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = fs_exact(c, sites), fd = fs_exact(d, sites);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a);
      fc = fs_exact(c, sites);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a);
      fd = fs_exact(d, sites);
    }
  }
  return std::max(fc, fd);
}

TEST(ModeSet, AntiperiodicPairs) {
  const auto m = mode_set(8);
  ASSERT_EQ(m.momenta.size(), 8u);
  for (double k : m.momenta) {
    const double m_half = k * 8 / std::numbers::pi;  // odd integer
    EXPECT_NEAR(std::remainder(m_half - 1.0, 2.0), 0.0, 1e-12);
  }
  const auto pos = m.positive();
  EXPECT_EQ(pos.size(), 4u);
  for (double k : pos) {
    int partners = 0;
    for (double q : m.momenta) {
      if (std::abs(std::remainder(q + k, 2 * std::numbers::pi)) < 1e-12) ++partners;
    }
    EXPECT_EQ(partners, 1) << k;
  }
}

TEST(Oracle, MatchesExactDiagonalization) {
  EXPECT_NEAR(fs_exact(0.5, 10) / ed_chi(10, 0.5), 1.0, 1e-6);
  for (int L : {6, 8, 10}) {
    for (double lam : {0.3, 0.5, 1.5, 2.0}) {
      const double ed = ed_chi(L, lam);
      EXPECT_LE(std::abs(fs_exact(lam, L) - ed) / ed, 1e-6) << "L=" << L << " lambda=" << lam;
    }
  }
}

TEST(Oracle, MatchesFiniteDifference) {
  HamiltonianFamily f(ModelParams::tfim(10, 0.5), DrivingTag::tfim_x_sum);
  EXPECT_NEAR(fs_exact(0.5, 10) / fs_finite_difference(f, 0.5).chi, 1.0, 1e-6);
}

TEST(Oracle, FerromagneticConventionAgrees) {
  // Flipping every other spin maps the +zz ring onto the -zz ring; the
  // oracle must equal both. Build the -zz ring densely for L = 6.
  const int L = 6;
  const std::size_t dim = std::size_t{1} << L;
  for (double lam : {0.5, 1.2}) {
    const LinearMap ferro = [&](std::span<const double> in, std::span<double> out) {
      for (std::size_t s = 0; s < dim; ++s) {
        double zz = 0.0;
        for (int j = 0; j < L; ++j) {
          const int a = (s >> j) & 1, b = (s >> ((j + 1) % L)) & 1;
          zz += a == b ? -1.0 : 1.0;
        }
        double acc = zz * in[s];
        for (int j = 0; j < L; ++j) acc += lam * in[s ^ (std::size_t{1} << j)];
        out[s] = acc;
      }
    };
    const LinearMap xsum = [&](std::span<const double> in, std::span<double> out) {
      for (std::size_t s = 0; s < dim; ++s) {
        double acc = 0.0;
        for (int j = 0; j < L; ++j) acc += in[s ^ (std::size_t{1} << j)];
        out[s] = acc;
      }
    };
    const double chi = fs_spectral_sum(dense_spectrum(ferro, dim), xsum, lam).chi;
    EXPECT_NEAR(fs_exact(lam, L) / chi, 1.0, 1e-10);
  }
}

TEST(Oracle, PositiveAndHalfSumEqualsFullSum) {
  for (int L : {6, 64, 1000}) {
    for (double lam : {0.2, 0.99, 1.0, 1.01, 3.0}) {
      const double half = fs_exact(lam, L);
      EXPECT_GT(half, 0.0);
      EXPECT_NEAR(fs_exact_full_sum(lam, L), half, 1e-12 * half);
    }
  }
}

TEST(Oracle, QuarticDecay) {
  const double a = fs_exact(10.0, 64), b = fs_exact(20.0, 64), c = fs_exact(40.0, 64);
  EXPECT_NEAR(a / b, 16.0, 16.0 * 0.15);
  EXPECT_NEAR(b / c, 16.0, 16.0 * 0.05);
  EXPECT_LT(c, a);
}

TEST(Oracle, PeakGrowsAsSquareOfSize) {
  const std::vector<double> sizes = {64, 128, 256, 512};
  std::vector<double> peaks;
  for (double L : sizes) peaks.push_back(oracle_peak(static_cast<int>(L)));
  const auto fit = fit_power(sizes, peaks);
  EXPECT_NEAR(fit.exponent, 2.0, 0.02);
}

TEST(Oracle, RejectsInvalidInput) {
  EXPECT_THROW((void)fs_exact(0.0, 8), DomainError);
  EXPECT_THROW((void)fs_exact(-1.0, 8), DomainError);
  EXPECT_THROW((void)fs_exact(std::nan(""), 8), DomainError);
  EXPECT_THROW((void)fs_exact(0.5, 7), DomainError);
}

TEST(DensityExponent, StableUnderDoubling) {
  const auto a = fs_density_exponent(1.05, 1.5, 4096);
  const auto b = fs_density_exponent(1.05, 1.5, 8192);
  EXPECT_LT(std::abs(a.slope - b.slope), 0.01);
  EXPECT_EQ(a.sites, 4096);
  EXPECT_LT(a.slope, 0.0);
}

TEST(DensityExponent, SlopeMatchesThermodynamicForm) {
  // chi/L -> 1 / (16 lambda^2 (lambda^2 - 1)) for lambda > 1; its log-log
  // slope against lambda - 1, sampled the same way, is the reference.
  const auto r = fs_density_exponent(1.05, 1.5, 8192);
  std::vector<double> g, y;
  for (int i = 0; i < r.samples; ++i) {
    const double lam = std::exp(std::log(0.05) + (std::log(0.5) - std::log(0.05)) * i /
                                                     (r.samples - 1)) + 1.0;
    g.push_back(lam - 1.0);
    y.push_back(1.0 / (16.0 * lam * lam * (lam * lam - 1.0)));
  }
  EXPECT_NEAR(r.slope, fit_power(g, y).exponent, 0.02);
}

TEST(DensityExponent, ReportsCrossoverFarFromCriticality) {
  const auto r = fs_density_exponent(2.0, 4.0);
  EXPECT_TRUE(r.crossover);
  EXPECT_GT(std::abs(r.slope + 1.0), 0.05);
}

TEST(DensityExponent, RefusesWindowInsideCutoff) {
  const double cutoff = 4.0 * std::numbers::pi / 4096;
  EXPECT_THROW((void)fs_density_exponent(1.0 + 0.5 * cutoff, 1.5), DomainError);
  EXPECT_THROW((void)fs_density_exponent(0.5, 1.5), DomainError);
  EXPECT_THROW((void)fs_density_exponent(1.5, 1.2), DomainError);
  EXPECT_NO_THROW((void)fs_density_exponent(1.0 + 2.0 * cutoff, 1.5));
}

}  // namespace
}  // namespace critx
