// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "critx/error.hpp"

namespace critx {

std::string_view to_string(FsMethod method) noexcept {
  switch (method) {
    case FsMethod::finite_difference: return "finite_difference";
    case FsMethod::spectral_sum: return "spectral_sum";
    case FsMethod::linear_response: return "linear_response";
  }
  return "?";
}

FsMethod parse_fs_method(std::string_view text) {
  if (text == "finite_difference" || text == "fd") return FsMethod::finite_difference;
  if (text == "spectral_sum" || text == "spectral") return FsMethod::spectral_sum;
  if (text == "linear_response" || text == "lr") return FsMethod::linear_response;
  throw DomainError("unknown FS method '" + std::string(text) + "'");
}

double overlap(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("overlap: dimension mismatch");
  return std::min(1.0, std::abs(dot(a, b)));
}

double log_overlap(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("overlap: dimension mismatch");
  const double sign = dot(a, b) < 0.0 ? -1.0 : 1.0;
  double dist2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - sign * b[i];
    dist2 += d * d;
  }
  // |<a|b>| = 1 - ||a - sign b||^2 / 2 for unit vectors.
  const double f = 1.0 - 0.5 * dist2;
  if (!(f > 0.0)) return -std::numeric_limits<double>::infinity();
  return std::log1p(-0.5 * dist2);
}

namespace {

void require_unique(const EigResult& r, double x) {
  if (r.near_degenerate) {
    throw DegeneracyError("near-degenerate ground state at x = " + std::to_string(x) +
                          " (gap estimate " + std::to_string(r.gap_estimate) + ")");
  }
}

double finite_chi(const EigResult& a, const EigResult& b, double step) {
  const double lf = log_overlap(a.psi0, b.psi0);
  if (!std::isfinite(lf)) {
    throw DegeneracyError("vanishing ground-state overlap: level crossing inside the step");
  }
  return -2.0 * lf / (step * step);
}

}  // namespace

FsPoint fs_finite_difference(const GroundStateFn& ground, double x, double delta) {
  if (!(delta > 0.0)) throw DomainError("finite-difference step must be positive");
  const double offsets[] = {-0.5 * delta, -0.25 * delta, 0.25 * delta, 0.5 * delta};
  EigResult states[4];
  FsPoint point;
  point.x = x;
  point.method = FsMethod::finite_difference;
  point.delta_used = delta;
  point.gap_estimate = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    states[i] = ground(x + offsets[i]);
    require_unique(states[i], x + offsets[i]);
    point.residual = std::max(point.residual, states[i].residual);
    point.iterations += states[i].iterations;
    point.gap_estimate = std::min(point.gap_estimate, states[i].gap_estimate);
  }
  point.chi_delta = finite_chi(states[0], states[3], delta);
  point.chi_half_delta = finite_chi(states[1], states[2], 0.5 * delta);
  // Rounding can leave a tiny negative value when chi vanishes.
  point.chi = std::max(0.0, (4.0 * point.chi_half_delta - point.chi_delta) / 3.0);
  return point;
}

FsPoint fs_finite_difference(const HamiltonianFamily& family, double x,
                             const FidelityOptions& options) {
  const auto ground = [&](double y) {
    const auto H = family.at(y);
    return ground_state(H->as_map(), H->dimension(), options.lanczos);
  };
  return fs_finite_difference(ground, x, options.delta);
}

FsPoint fs_spectral_sum(const Spectrum& spectrum, const LinearMap& driving, double x) {
  const std::size_t dim = spectrum.dim;
  FsPoint point;
  point.x = x;
  point.method = FsMethod::spectral_sum;
  if (dim < 2) return point;
  const double e0 = spectrum.energies[0];
  const double gap = spectrum.energies[1] - e0;
  point.gap_estimate = gap;
  if (gap <= 1e-8 * std::max(1.0, std::abs(e0))) {
    throw DegeneracyError("spectral_sum: degenerate ground level (gap " + std::to_string(gap) +
                          ")");
  }
  Vector hi_psi0(dim);
  driving(spectrum.vector(0), hi_psi0);
  double chi = 0.0;
  for (std::size_t n = 1; n < dim; ++n) {
    const double m = dot(spectrum.vector(n), hi_psi0);
    const double de = spectrum.energies[n] - e0;
    chi += (m * m) / (de * de);
  }
  point.chi = chi;
  return point;
}

FsPoint fs_spectral_sum(const HamiltonianFamily& family, double x) {
  const auto H = family.at(x);
  const auto spectrum = dense_spectrum(H->as_map(), H->dimension());
  return fs_spectral_sum(spectrum, H->driving_map(family.tag()), x);
}

FsPoint fs_linear_response(const LinearMap& apply, double E0, std::span<const double> psi0,
                           const LinearMap& driving, const DeflatedSolveOptions& options) {
  Vector rhs(psi0.size());
  driving(psi0, rhs);
  const auto solved = deflated_solve(apply, E0, psi0, rhs, options);
  FsPoint point;
  point.method = FsMethod::linear_response;
  point.chi = dot(solved.x, solved.x);
  point.residual = solved.relative_residual;
  point.iterations = solved.iterations;
  return point;
}

FsPoint fs_linear_response(const HamiltonianFamily& family, double x,
                           const FidelityOptions& options) {
  const auto H = family.at(x);
  const auto gs = ground_state(H->as_map(), H->dimension(), options.lanczos);
  require_unique(gs, x);
  auto point = fs_linear_response(H->as_map(), gs.E0, gs.psi0, H->driving_map(family.tag()),
                                  options.solve);
  point.x = x;
  point.residual = std::max(point.residual, gs.residual);
  point.iterations += gs.iterations;
  point.gap_estimate = gs.gap_estimate;
  return point;
}

FsPoint fs_h_driven(int sites, double lambda, const FidelityOptions& options) {
  if (!(lambda > 1.0)) {
    throw DomainError(
        "h-driven FS is restricted to lambda > 1: below the transition the finite-ring Z2 "
        "quasi-degeneracy dominates the response");
  }
  const auto H = make_hamiltonian(ModelParams::tfim(sites, lambda, 0.0));
  const auto gs = ground_state(H->as_map(), H->dimension(), options.lanczos);
  require_unique(gs, lambda);
  auto point = fs_linear_response(H->as_map(), gs.E0, gs.psi0,
                                  H->driving_map(DrivingTag::tfim_z_sum), options.solve);
  point.x = lambda;
  point.residual = std::max(point.residual, gs.residual);
  point.iterations += gs.iterations;
  point.gap_estimate = gs.gap_estimate;
  return point;
}

FsPoint fs_evaluate(const HamiltonianFamily& family, double x, FsMethod method,
                    const FidelityOptions& options) {
  switch (method) {
    case FsMethod::finite_difference: return fs_finite_difference(family, x, options);
    case FsMethod::spectral_sum: return fs_spectral_sum(family, x);
    case FsMethod::linear_response: return fs_linear_response(family, x, options);
  }
  throw DomainError("unknown FS method");
}

}  // namespace critx
