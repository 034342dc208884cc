// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/tfim_oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "critx/error.hpp"
#include "critx/scaling.hpp"

namespace critx {

namespace {

void check_sites(int sites) {
  if (sites < 2 || sites % 2 != 0) {
    throw DomainError("TFIM oracle needs an even ring size, got " + std::to_string(sites));
  }
}

double mode_term(double k, double lambda) {
  const double s = std::sin(k);
  const double e = 1.0 + lambda * lambda - 2.0 * lambda * std::cos(k);
  return s * s / (4.0 * e * e);
}

}  // namespace

Vector ModeSet::positive() const {
  Vector out;
  for (const double k : momenta) {
    if (k > 0.0 && k < std::numbers::pi) out.push_back(k);
  }
  return out;
}

ModeSet mode_set(int sites) {
  check_sites(sites);
  ModeSet set;
  set.sites = sites;
  set.momenta.reserve(static_cast<std::size_t>(sites));
  // Centred on zero so the set is visibly closed under k -> -k.
  for (int m = -sites / 2; m < sites / 2; ++m) {
    set.momenta.push_back((2.0 * m + 1.0) * std::numbers::pi / sites);
  }
  return set;
}

double bogoliubov_angle(double k, double lambda) {
  return std::atan2(std::sin(k), lambda - std::cos(k));
}

double fs_exact(double lambda, int sites) {
  check_sites(sites);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("TFIM oracle needs a finite lambda > 0");
  }
  double chi = 0.0;
  for (int m = 0; m < sites / 2; ++m) {
    chi += mode_term((2.0 * m + 1.0) * std::numbers::pi / sites, lambda);
  }
  return chi;
}

double fs_exact_full_sum(double lambda, int sites) {
  check_sites(sites);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("TFIM oracle needs a finite lambda > 0");
  }
  double chi = 0.0;
  for (const double k : mode_set(sites).momenta) chi += mode_term(k, lambda);
  return 0.5 * chi;
}

DensityExponent fs_density_exponent(double lambda_lo, double lambda_hi, int sites, int samples) {
  check_sites(sites);
  if (!(lambda_lo < lambda_hi)) throw DomainError("density exponent: empty lambda window");
  if ((lambda_lo - 1.0) * (lambda_hi - 1.0) <= 0.0) {
    throw DomainError("density exponent: window must lie on one side of lambda = 1");
  }
  const double cutoff = 4.0 * std::numbers::pi / sites;
  const double d_lo = std::min(std::abs(lambda_lo - 1.0), std::abs(lambda_hi - 1.0));
  const double d_hi = std::max(std::abs(lambda_lo - 1.0), std::abs(lambda_hi - 1.0));
  if (d_lo < cutoff) {
    throw DomainError("density exponent: |lambda - 1| = " + std::to_string(d_lo) +
                      " is inside the finite-size cutoff 4 pi / L = " + std::to_string(cutoff));
  }
  if (samples < 3) throw DomainError("density exponent: need at least 3 samples");
  const double side = lambda_lo > 1.0 ? 1.0 : -1.0;

  Vector dist(static_cast<std::size_t>(samples));
  Vector density(dist.size());
  for (int i = 0; i < samples; ++i) {
    const double d = d_lo * std::pow(d_hi / d_lo, static_cast<double>(i) / (samples - 1));
    dist[static_cast<std::size_t>(i)] = d;
    density[static_cast<std::size_t>(i)] = fs_exact(1.0 + side * d, sites) / sites;
  }
  const auto fit = fit_power(dist, density);
  DensityExponent out;
  out.slope = fit.exponent;
  out.slope_stderr = fit.exponent_stderr;
  out.r_squared = fit.r_squared;
  out.lambda_lo = lambda_lo;
  out.lambda_hi = lambda_hi;
  out.sites = sites;
  out.samples = samples;
  out.crossover = std::abs(fit.exponent + 1.0) > 0.05;
  return out;
}

}  // namespace critx
