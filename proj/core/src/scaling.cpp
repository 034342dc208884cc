// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/scaling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "critx/error.hpp"

namespace critx {

namespace {

struct LinearFit {
  Eigen::VectorXd coeff;
  Eigen::VectorXd stderr_;
  double rss = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares y ~ X beta with standard errors from the residual
// variance (zero when the fit has no degrees of freedom left).
LinearFit least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  LinearFit fit;
  fit.n = static_cast<std::size_t>(X.rows());
  const auto p = X.cols();
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < p) throw AnalysisRefusal("least squares: design matrix is rank deficient");
  fit.coeff = qr.solve(y);
  const Eigen::VectorXd r = y - X * fit.coeff;
  fit.rss = r.squaredNorm();
  const auto dof = X.rows() - p;
  const double sigma2 = dof > 0 ? fit.rss / static_cast<double>(dof) : 0.0;
  const Eigen::MatrixXd cov = sigma2 * (X.transpose() * X).inverse();
  fit.stderr_ = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return fit;
}

struct Parabola {
  double vertex;
  double value;
  double curvature;
};

Parabola parabola_through(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  Parabola p{};
  p.curvature = 2.0 * a;
  if (a == 0.0) {
    p.vertex = x1;
    p.value = y1;
    return p;
  }
  p.vertex = 0.5 * (x0 + x1) - d01 / (2.0 * a);
  p.value = y0 + d01 * (p.vertex - x0) + a * (p.vertex - x0) * (p.vertex - x1);
  return p;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct PooledPoint {
  double x;
  double y;
  std::size_t curve;
};

}  // namespace

void FsCurve::validate() const {
  if (grid.size() != chi.size()) throw DomainError("FsCurve: grid and chi lengths differ");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("FsCurve: grid not strictly ascending");
  }
  for (const double c : chi) {
    if (!std::isfinite(c) || c < 0.0) throw DomainError("FsCurve: chi must be finite and >= 0");
  }
}

PeakEstimate find_peak(const FsCurve& curve, const RefineFn& refine, int max_refinements) {
  curve.validate();
  if (curve.size() < 5) throw AnalysisRefusal("find_peak: need at least 5 samples");
  Vector t = curve.grid;
  Vector c = curve.chi;
  const auto argmax = static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
  if (argmax == 0 || argmax + 1 == c.size()) {
    throw AnalysisRefusal("find_peak: maximum at grid boundary t = " + fmt(t[argmax]) +
                          " (L = " + std::to_string(curve.sites()) + "); extend the grid");
  }

  PeakEstimate peak;
  peak.lo = argmax - 1;
  peak.mid = argmax;
  peak.hi = argmax + 1;
  auto fit = [&](std::size_t m) {
    return parabola_through(t[m - 1], c[m - 1], t[m], c[m], t[m + 1], c[m + 1]);
  };
  Parabola p = fit(argmax);
  if (!(p.curvature < 0.0)) {
    throw AnalysisRefusal("find_peak: flat maximum near t = " + fmt(t[argmax]));
  }

  if (refine) {
    for (int r = 0; r < max_refinements; ++r) {
      const auto pos = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), p.vertex) - t.begin());
      if ((pos < t.size() && std::abs(t[pos] - p.vertex) <= 1e-12 * std::max(1.0, std::abs(p.vertex))) ||
          (pos > 0 && std::abs(t[pos - 1] - p.vertex) <= 1e-12 * std::max(1.0, std::abs(p.vertex)))) {
        break;
      }
      const double value = refine(p.vertex);
      t.insert(t.begin() + static_cast<std::ptrdiff_t>(pos), p.vertex);
      c.insert(c.begin() + static_cast<std::ptrdiff_t>(pos), value);
      ++peak.refinements;
      const auto m = static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
      if (m == 0 || m + 1 == c.size()) break;
      const Parabola q = fit(m);
      if (!(q.curvature < 0.0)) break;
      p = q;
    }
  }

  peak.t_max = p.vertex;
  peak.chi_max = p.value;
  peak.curvature = p.curvature;
  return peak;
}

PowerFit fit_power(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("fit_power: length mismatch");
  if (x.size() < 3) throw DomainError("fit_power: need at least 3 points");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd ly(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw DomainError("fit_power: values must be positive");
    X(i, 0) = 1.0;
    X(i, 1) = std::log(x[k]);
    ly(i) = std::log(y[k]);
  }
  const auto fit = least_squares(X, ly);
  PowerFit out;
  out.exponent = fit.coeff(1);
  out.prefactor = std::exp(fit.coeff(0));
  out.exponent_stderr = fit.stderr_(1);
  out.prefactor_stderr = out.prefactor * fit.stderr_(0);
  out.residual = fit.rss;
  const double mean = ly.mean();
  const double tss = (ly.array() - mean).square().sum();
  out.r_squared = tss > 0.0 ? 1.0 - fit.rss / tss : 1.0;
  return out;
}

RescaledCurve rescale(const FsCurve& curve, const PeakEstimate& peak, double nu,
                      double half_width) {
  RescaledCurve out;
  out.sites = curve.sites();
  const double factor = std::pow(static_cast<double>(curve.sites()), nu);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double dt = curve.grid[i] - peak.t_max;
    if (std::abs(dt) > half_width) continue;
    if (!(curve.chi[i] > 0.0)) throw DomainError("rescale: chi must be positive in the window");
    out.x.push_back(factor * dt);
    out.y.push_back((peak.chi_max - curve.chi[i]) / curve.chi[i]);
  }
  return out;
}

namespace {

std::vector<RescaledCurve> windowed(std::span<const FsCurve> curves,
                                    std::span<const PeakEstimate> peaks, double nu,
                                    const CollapseOptions& options) {
  std::vector<RescaledCurve> out;
  out.reserve(curves.size());
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto full = rescale(curves[i], peaks[i], nu, options.t_window);
    RescaledCurve kept;
    kept.sites = full.sites;
    for (std::size_t j = 0; j < full.x.size(); ++j) {
      if (full.y[j] <= options.y_window) {
        kept.x.push_back(full.x[j]);
        kept.y.push_back(full.y[j]);
      }
    }
    out.push_back(std::move(kept));
  }
  return out;
}

// Weighted local quadratic regression evaluated at x0.
double local_quadratic(std::vector<std::pair<double, double>>& pts, double x0, int k) {
  std::sort(pts.begin(), pts.end(), [x0](const auto& a, const auto& b) {
    return std::abs(a.first - x0) < std::abs(b.first - x0);
  });
  const std::size_t used = std::min<std::size_t>(static_cast<std::size_t>(k), pts.size());
  const double h = std::abs(pts[used - 1].first - x0) * 1.0001 + 1e-300;
  const int degree = used >= 4 ? 2 : 1;
  Eigen::MatrixXd X(static_cast<Eigen::Index>(used), degree + 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(used));
  for (std::size_t i = 0; i < used; ++i) {
    const double d = pts[i].first - x0;
    const double u = std::abs(d) / h;
    const double w = std::sqrt(std::pow(1.0 - u * u * u, 3));
    const auto r = static_cast<Eigen::Index>(i);
    X(r, 0) = w;
    X(r, 1) = w * d;
    if (degree == 2) X(r, 2) = w * d * d;
    y(r) = w * pts[i].second;
  }
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  return beta(0);
}

}  // namespace

double collapse_cost(std::span<const FsCurve> curves, std::span<const PeakEstimate> peaks,
                     double nu, const CollapseOptions& options, std::size_t* used) {
  if (curves.size() != peaks.size()) throw DomainError("collapse: one peak per curve required");
  const auto rescaled = windowed(curves, peaks, nu, options);
  double sum = 0.0;
  std::size_t count = 0;
  std::vector<std::pair<double, double>> others;
  for (std::size_t i = 0; i < rescaled.size(); ++i) {
    others.clear();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t j = 0; j < rescaled.size(); ++j) {
      if (j == i) continue;
      for (std::size_t q = 0; q < rescaled[j].x.size(); ++q) {
        others.emplace_back(rescaled[j].x[q], rescaled[j].y[q]);
        lo = std::min(lo, rescaled[j].x[q]);
        hi = std::max(hi, rescaled[j].x[q]);
      }
    }
    if (others.size() < 3) continue;
    for (std::size_t p = 0; p < rescaled[i].x.size(); ++p) {
      const double x0 = rescaled[i].x[p];
      if (x0 < lo || x0 > hi) continue;
      const double master = local_quadratic(others, x0, options.neighbours);
      const double d = rescaled[i].y[p] - master;
      sum += d * d;
      ++count;
    }
  }
  if (used) *used = count;
  if (count == 0) return std::numeric_limits<double>::infinity();
  return sum / static_cast<double>(count);
}

CollapseFit collapse_fit(std::span<const FsCurve> curves, std::span<const PeakEstimate> peaks,
                         const CollapseOptions& options) {
  if (curves.size() < 3) throw AnalysisRefusal("collapse: need at least 3 system sizes");
  if (curves.size() != peaks.size()) throw DomainError("collapse: one peak per curve required");
  if (!(options.nu_lo < options.nu_hi)) throw DomainError("collapse: empty nu bracket");

  CollapseFit out;
  out.options = options;
  out.peaks.assign(peaks.begin(), peaks.end());
  for (const auto& c : curves) out.sizes.push_back(c.sites());

  const int n_scan = std::max(options.scan_points, 5);
  const double step = (options.nu_hi - options.nu_lo) / (n_scan - 1);
  std::size_t best = 0;
  for (int i = 0; i < n_scan; ++i) {
    const double nu = options.nu_lo + step * i;
    out.scan_nu.push_back(nu);
    out.scan_cost.push_back(collapse_cost(curves, peaks, nu, options));
    if (out.scan_cost.back() < out.scan_cost[best]) best = static_cast<std::size_t>(i);
  }
  if (best == 0 || best + 1 == out.scan_cost.size()) {
    throw AnalysisRefusal("collapse: minimum not bracketed in [" + fmt(options.nu_lo) + ", " +
                          fmt(options.nu_hi) + "]; cost at ends " + fmt(out.scan_cost.front()) +
                          " / " + fmt(out.scan_cost.back()));
  }

  // Golden-section search on the scan cell around the best sample.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = out.scan_nu[best - 1];
  double b = out.scan_nu[best + 1];
  auto cost = [&](double nu) { return collapse_cost(curves, peaks, nu, options); };
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = cost(x1);
  double f2 = cost(x2);
  while (b - a > options.nu_tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = cost(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = cost(x2);
    }
  }
  out.nu = 0.5 * (a + b);
  out.residual = collapse_cost(curves, peaks, out.nu, options, &out.points);

  // Standard error from the local curvature of the cost: treating
  // n * cost as a sum of squares with variance cost_min per point.
  {
    const double h = std::max(1e-3, 0.02 * (options.nu_hi - options.nu_lo));
    const double cm = cost(out.nu - h);
    const double cp = cost(out.nu + h);
    const double k = (cm - 2.0 * out.residual + cp) / (2.0 * h * h);
    out.nu_stderr = (k > 0.0 && out.points > 0)
                        ? std::sqrt(out.residual / (k * static_cast<double>(out.points)))
                        : std::numeric_limits<double>::infinity();
  }

  Vector sizes;
  Vector heights;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    sizes.push_back(curves[i].sites());
    heights.push_back(peaks[i].chi_max);
  }
  const auto mu_fit = fit_power(sizes, heights);
  out.mu = mu_fit.exponent;
  out.mu_stderr = mu_fit.exponent_stderr;
  out.alpha = out.mu / out.nu;
  out.alpha_stderr = std::abs(out.alpha) * std::sqrt(std::pow(out.mu_stderr / out.mu, 2) +
                                                     std::pow(out.nu_stderr / out.nu, 2));
  out.rescaled = windowed(curves, peaks, out.nu, options);

  // A, B from 1/chi = (1/A) L^-mu + (B/A) |t - t_max|^alpha.
  {
    std::vector<std::array<double, 3>> rows;
    for (std::size_t i = 0; i < curves.size(); ++i) {
      const double lm = std::pow(static_cast<double>(curves[i].sites()), -out.mu);
      for (std::size_t j = 0; j < curves[i].size(); ++j) {
        const double dt = curves[i].grid[j] - peaks[i].t_max;
        const double chi = curves[i].chi[j];
        if (!(chi > 0.0) || std::abs(dt) > options.t_window) continue;
        if ((peaks[i].chi_max - chi) / chi > options.y_window) continue;
        if (dt == 0.0 && out.alpha < 0.0) continue;
        rows.push_back({lm, std::pow(std::abs(dt), out.alpha), 1.0 / chi});
      }
    }
    if (rows.size() >= 3) {
      Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), 2);
      Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t r = 0; r < rows.size(); ++r) {
        X(static_cast<Eigen::Index>(r), 0) = rows[r][0];
        X(static_cast<Eigen::Index>(r), 1) = rows[r][1];
        y(static_cast<Eigen::Index>(r)) = rows[r][2];
      }
      try {
        const auto fit = least_squares(X, y);
        if (fit.coeff(0) != 0.0) {
          out.A = 1.0 / fit.coeff(0);
          out.B = fit.coeff(1) / fit.coeff(0);
        }
      } catch (const AnalysisRefusal&) {
        // A, B stay NaN; the exponents are still meaningful.
      }
    }
  }
  return out;
}

CollapseFit collapse_fit(std::span<const FsCurve> curves, const CollapseOptions& options) {
  std::vector<PeakEstimate> peaks;
  peaks.reserve(curves.size());
  for (const auto& c : curves) peaks.push_back(find_peak(c));
  return collapse_fit(curves, peaks, options);
}

KtFormFit fit_kt_form(std::span<const FsCurve> curves, std::span<const PeakEstimate> peaks,
                      double half_width) {
  if (curves.size() != peaks.size()) throw DomainError("ktform: one peak per curve required");
  if (curves.size() < 2) throw AnalysisRefusal("ktform: need at least 2 system sizes");
  if (!(half_width > 0.0)) throw DomainError("ktform: half width must be positive");
  std::vector<std::array<double, 4>> rows;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const double L = curves[i].sites();
    std::size_t in_window = 0;
    for (std::size_t j = 0; j < curves[i].size(); ++j) {
      const double dt = curves[i].grid[j] - peaks[i].t_max;
      if (std::abs(dt) > half_width) continue;
      rows.push_back({1.0, L, -dt * dt / std::sqrt(L), curves[i].chi[j]});
      ++in_window;
    }
    if (in_window < 3) {
      throw AnalysisRefusal("ktform: fewer than 3 samples within +-" + fmt(half_width) +
                            " of t_max for L = " + std::to_string(curves[i].sites()));
    }
  }
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < 3; ++c) X(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    y(static_cast<Eigen::Index>(r)) = rows[r][3];
  }
  const auto fit = least_squares(X, y);
  KtFormFit out;
  out.a = fit.coeff(0);
  out.b = fit.coeff(1);
  out.c = fit.coeff(2);
  out.a_stderr = fit.stderr_(0);
  out.b_stderr = fit.stderr_(1);
  out.c_stderr = fit.stderr_(2);
  out.residual = std::sqrt(fit.rss / static_cast<double>(rows.size()));
  out.half_width = half_width;
  out.points = rows.size();
  return out;
}

std::string to_string(TcLaw law) {
  return law == TcLaw::landau_L2 ? "landau_L2" : "kt_one_over_L";
}

TcEstimate extrapolate_tc_power(std::span<const int> sizes, std::span<const double> markers,
                                double power) {
  if (sizes.size() != markers.size()) throw DomainError("tc: length mismatch");
  if (sizes.size() < 3) throw AnalysisRefusal("tc: need at least 3 system sizes");
  const auto n = static_cast<Eigen::Index>(sizes.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (sizes[k] <= 0) throw DomainError("tc: sizes must be positive");
    X(i, 0) = 1.0;
    X(i, 1) = std::pow(static_cast<double>(sizes[k]), -power);
    y(i) = markers[k];
  }
  const auto fit = least_squares(X, y);
  TcEstimate out;
  out.tc = fit.coeff(0);
  out.slope = fit.coeff(1);
  out.tc_stderr = fit.stderr_(0);
  out.slope_stderr = fit.stderr_(1);
  out.residual = fit.rss;
  out.power = power;
  out.sizes.assign(sizes.begin(), sizes.end());
  out.markers.assign(markers.begin(), markers.end());
  return out;
}

TcEstimate extrapolate_tc_landau(std::span<const int> sizes, std::span<const double> t_max) {
  auto out = extrapolate_tc_power(sizes, t_max, 2.0);
  out.law = TcLaw::landau_L2;
  return out;
}

Vector derivative(std::span<const double> grid, std::span<const double> values) {
  if (grid.size() != values.size()) throw DomainError("derivative: length mismatch");
  Vector d(grid.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double h1 = grid[i] - grid[i - 1];
    const double h2 = grid[i + 1] - grid[i];
    d[i] = (h1 * h1 * (values[i + 1] - values[i]) + h2 * h2 * (values[i] - values[i - 1])) /
           (h1 * h2 * (h1 + h2));
  }
  return d;
}

double steepest_descent_point(const FsCurve& curve) {
  curve.validate();
  if (curve.size() < 5) throw AnalysisRefusal("tc-kt: need at least 5 samples per curve");
  const auto d = derivative(curve.grid, curve.chi);
  std::size_t best = 1;
  for (std::size_t i = 1; i + 1 < d.size(); ++i) {
    if (d[i] < d[best]) best = i;
  }
  if (best <= 1 || best + 2 >= d.size()) {
    throw AnalysisRefusal("tc-kt: steepest descent at grid boundary t = " + fmt(curve.grid[best]) +
                          " (L = " + std::to_string(curve.sites()) + "); extend the grid");
  }
  const auto p = parabola_through(curve.grid[best - 1], d[best - 1], curve.grid[best], d[best],
                                  curve.grid[best + 1], d[best + 1]);
  if (!(p.curvature > 0.0)) return curve.grid[best];
  return p.vertex;
}

TcEstimate extrapolate_tc_kt(std::span<const FsCurve> curves) {
  if (curves.size() < 3) throw AnalysisRefusal("tc-kt: need at least 3 system sizes");
  std::vector<int> sizes;
  Vector markers;
  for (const auto& c : curves) {
    sizes.push_back(c.sites());
    markers.push_back(steepest_descent_point(c));
  }
  auto out = extrapolate_tc_power(sizes, markers, 1.0);
  out.law = TcLaw::kt_one_over_L;
  return out;
}

}  // namespace critx
