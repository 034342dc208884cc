// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file scaling.hpp
 * @brief Finite-size-scaling analysis of FS curves: peak location, power-law
 *        fits, data collapse, the half-filling quadratic peak form, and
 *        critical-point extrapolation.
 */

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "critx/fidelity.hpp"
#include "critx/models.hpp"

namespace critx {

/// FS sampled on an ascending grid of the driving parameter for one model
/// instance. `params` holds every coupling; the driving value in it is ignored.
struct FsCurve {
  ModelParams params{};
  DrivingTag tag = DrivingTag::ahm_down_hop;
  FsMethod method = FsMethod::finite_difference;
  Vector grid;
  Vector chi;
  std::map<std::string, std::string> metadata;

  [[nodiscard]] std::size_t size() const noexcept { return grid.size(); }
  [[nodiscard]] int sites() const noexcept { return params.sites; }

  /// Throws DomainError unless the grid is strictly ascending, matches chi in
  /// length, and every chi is finite and >= 0.
  void validate() const;
};

struct PeakEstimate {
  double t_max = 0.0;
  double chi_max = 0.0;
  double curvature = 0.0;  ///< second derivative of the local parabola
  std::size_t lo = 0;      ///< grid indices of the three points used
  std::size_t mid = 0;
  std::size_t hi = 0;
  int refinements = 0;
};

/// Re-evaluates chi at a trial peak location.
using RefineFn = std::function<double(double)>;

/// Parabola through the largest sample and its two neighbours. With a refine
/// callback the vertex is re-evaluated and the parabola refitted up to
/// `max_refinements` times. Refuses (AnalysisRefusal) when the maximum sample
/// sits on the grid boundary.
[[nodiscard]] PeakEstimate find_peak(const FsCurve& curve, const RefineFn& refine = {},
                                     int max_refinements = 3);

struct PowerFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  double exponent_stderr = 0.0;
  double prefactor_stderr = 0.0;
  double residual = 0.0;  ///< sum of squared log residuals
};

/// Least squares of ln y = ln prefactor + exponent ln x. Needs >= 3 positive points.
[[nodiscard]] PowerFit fit_power(std::span<const double> x, std::span<const double> y);

struct RescaledCurve {
  int sites = 0;
  Vector x;  ///< L^nu (t - t_max)
  Vector y;  ///< (chi_max - chi) / chi
};

/// Rescales the samples with |t - t_max| <= half_width (all samples by default).
[[nodiscard]] RescaledCurve rescale(const FsCurve& curve, const PeakEstimate& peak, double nu,
                                    double half_width = std::numeric_limits<double>::infinity());

struct CollapseOptions {
  double nu_lo = 1.0;
  double nu_hi = 4.0;
  /// Keep samples with (chi_max - chi)/chi <= y_window, i.e. chi above
  /// chi_max / (1 + y_window).
  double y_window = 1.0;
  /// Additional cut |t - t_max| <= t_window.
  double t_window = std::numeric_limits<double>::infinity();
  int neighbours = 8;      ///< k nearest pooled points in the local quadratic regression
  int scan_points = 41;    ///< coarse scan of the bracket before golden-section
  double nu_tol = 1e-5;
};

struct CollapseFit {
  double mu = 0.0;
  double mu_stderr = 0.0;
  double nu = 0.0;
  double nu_stderr = 0.0;
  double alpha = 0.0;  ///< mu / nu
  double alpha_stderr = 0.0;
  double A = std::numeric_limits<double>::quiet_NaN();
  double B = std::numeric_limits<double>::quiet_NaN();
  double residual = 0.0;  ///< collapse cost at the optimum
  std::size_t points = 0;  ///< pooled points that entered the cost
  std::vector<int> sizes;
  std::vector<PeakEstimate> peaks;
  Vector scan_nu;  ///< coarse scan, for diagnostics and plots
  Vector scan_cost;
  std::vector<RescaledCurve> rescaled;  ///< windowed curves at the optimum
  CollapseOptions options;
};

/// Collapse cost for a candidate nu: every windowed point is compared with a
/// local quadratic regression through the k nearest points of the *other*
/// sizes, and the mean squared deviation is returned. Points outside the
/// other sizes' x-range are skipped.
[[nodiscard]] double collapse_cost(std::span<const FsCurve> curves,
                                   std::span<const PeakEstimate> peaks, double nu,
                                   const CollapseOptions& options, std::size_t* used = nullptr);

/// Minimizes collapse_cost over [nu_lo, nu_hi] (coarse scan, then golden
/// section), then mu from fit_power on the peak heights, alpha = mu / nu, and
/// A, B of chi = A / (L^-mu + B |t - t_max|^alpha) by linear least squares in
/// 1/chi. Refuses when the minimum sits on a bracket end.
[[nodiscard]] CollapseFit collapse_fit(std::span<const FsCurve> curves,
                                       std::span<const PeakEstimate> peaks,
                                       const CollapseOptions& options = {});
[[nodiscard]] CollapseFit collapse_fit(std::span<const FsCurve> curves,
                                       const CollapseOptions& options = {});

/// chi ~= a + b L - c L^{-1/2} (t - t_max)^2 jointly over all sizes.
struct KtFormFit {
  double a = 0.0, b = 0.0, c = 0.0;
  double a_stderr = 0.0, b_stderr = 0.0, c_stderr = 0.0;
  double residual = 0.0;  ///< RMS deviation of the fit
  double half_width = 0.0;
  std::size_t points = 0;
};

[[nodiscard]] KtFormFit fit_kt_form(std::span<const FsCurve> curves,
                                    std::span<const PeakEstimate> peaks,
                                    double half_width = 0.05);

enum class TcLaw { landau_L2, kt_one_over_L };

[[nodiscard]] std::string to_string(TcLaw law);

struct TcEstimate {
  double tc = 0.0;
  double tc_stderr = 0.0;
  double slope = 0.0;  ///< coefficient of L^-p
  double slope_stderr = 0.0;
  double residual = 0.0;  ///< sum of squared deviations
  TcLaw law = TcLaw::landau_L2;
  double power = 2.0;
  std::vector<int> sizes;
  Vector markers;  ///< t_max (Landau) or derivative minimum (KT) per size
};

/// Least squares of marker(L) = tc + slope L^-power. Needs >= 3 sizes.
[[nodiscard]] TcEstimate extrapolate_tc_power(std::span<const int> sizes,
                                              std::span<const double> markers, double power);

/// t_max(L) = tc + c L^-2.
[[nodiscard]] TcEstimate extrapolate_tc_landau(std::span<const int> sizes,
                                               std::span<const double> t_max);

/// Central-difference dchi/dt on a (possibly non-uniform) grid; entries at
/// the two ends are NaN.
[[nodiscard]] Vector derivative(std::span<const double> grid, std::span<const double> values);

/// Location of the steepest decrease of chi(t) (parabolic refinement of the
/// minimum of dchi/dt). Refuses a minimum on the boundary.
[[nodiscard]] double steepest_descent_point(const FsCurve& curve);

/// Linear extrapolation of the steepest-descent points versus 1/L.
[[nodiscard]] TcEstimate extrapolate_tc_kt(std::span<const FsCurve> curves);

}  // namespace critx
