// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end checks, one line per criterion. Sweeps share a point cache so
// that repeated runs only pay for missing points.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "critx/analysis.hpp"
#include "critx/curve_io.hpp"
#include "critx/error.hpp"
#include "critx/fidelity.hpp"
#include "critx/scaling.hpp"
#include "critx/sweep.hpp"
#include "critx/tfim_oracle.hpp"

namespace fs = std::filesystem;
using namespace critx;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path cache;
  fs::path work;
  bool full = false;
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// An estimate passes when est +- se overlaps target +- tol. Whether the bare
// point estimate alone lies inside is reported as well.
struct Check {
  std::string name;
  double est, se, target, tol;

  [[nodiscard]] bool pass() const {
    const double s = std::isfinite(se) ? se : 0.0;
    return est + s >= target - tol && est - s <= target + tol;
  }
  [[nodiscard]] bool point_inside() const { return std::abs(est - target) <= tol; }
  [[nodiscard]] std::string str() const {
    return name + " = " + num(est) + " +- " + num(se, 2) + " (target " + num(target) + " +- " +
           num(tol, 3) + (point_inside() ? ", point inside" : ", point outside") + ")";
  }
};

Outcome combine(std::initializer_list<Check> checks, std::string extra = {}) {
  Outcome o{true, {}};
  for (const auto& c : checks) {
    o.pass = o.pass && c.pass();
    o.detail += (o.detail.empty() ? "" : "; ") + c.str();
  }
  if (!extra.empty()) o.detail += "; " + extra;
  return o;
}

SweepConfig ahm_config(const Context& ctx, std::vector<int> sizes, const std::string& filling,
                       std::vector<double> U, const std::string& tag) {
  SweepConfig c;
  c.model = ModelKind::ahm;
  c.sizes = std::move(sizes);
  c.filling = Filling::parse(filling);
  c.U_values = std::move(U);
  c.method = FsMethod::linear_response;
  c.basis = BasisKind::momentum_zero;
  c.cache_root = ctx.cache;
  c.output_dir = ctx.work / tag;
  return c;
}

// Runs the sweep and returns its curves grouped by U, ordered by L.
std::map<double, std::vector<FsCurve>> sweep_curves(const SweepConfig& config) {
  const auto result = run_sweep(config);
  if (result.failed > 0) {
    throw std::runtime_error(std::to_string(result.failed) + " sweep points failed");
  }
  std::map<double, std::vector<FsCurve>> out;
  for (const auto& c : result.curves) out[c.curve.params.U].push_back(c.curve);
  return out;
}

// --- criteria ---------------------------------------------------------------

Outcome cross_method(const Context&) {
  std::vector<std::pair<ModelParams, DrivingTag>> cases;
  for (auto [t, U] : {std::pair{0.5, 4.0}, {0.3, 10.0}, {0.8, 1.0}, {1.0, 30.0}}) {
    cases.push_back({ModelParams::ahm(3, t, U, 1, 1), DrivingTag::ahm_down_hop});
    cases.push_back({ModelParams::ahm(3, t, U, 2, 2), DrivingTag::ahm_down_hop});
  }
  for (auto [L, lam] : {std::pair{6, 0.5}, {6, 1.5}, {8, 0.9}, {8, 2.0}}) {
    cases.push_back({ModelParams::tfim(L, lam), DrivingTag::tfim_x_sum});
  }
  double worst = 0.0;
  for (const auto& [p, tag] : cases) {
    HamiltonianFamily f(p, tag);
    const double x = driving_value(p, tag);
    const double a = fs_finite_difference(f, x).chi;
    const double b = fs_spectral_sum(f, x).chi;
    const double c = fs_linear_response(f, x).chi;
    worst = std::max({worst, std::abs(a - b) / b, std::abs(a - c) / c, std::abs(b - c) / c});
  }
  return {worst <= 1e-5, std::to_string(cases.size()) + " instances, worst pairwise relative " +
                             "difference " + num(worst, 3) + " (limit 1e-05)"};
}

Outcome free_fermion_null(const Context&) {
  double worst = 0.0;
  int count = 0;
  for (int L : {4, 6, 8}) {
    for (int n = 1; n <= L / 2; ++n) {
      for (double t : {0.3, 0.7, 1.0}) {
        HamiltonianFamily f(ModelParams::ahm(L, t, 0.0, n, n), DrivingTag::ahm_down_hop);
        worst = std::max({worst, fs_finite_difference(f, t).chi, fs_linear_response(f, t).chi});
        ++count;
      }
    }
  }
  return {worst <= 1e-6,
          std::to_string(count) + " (L, sector, t) cases, max chi " + num(worst, 3) + " (limit 1e-06)"};
}

std::vector<FsCurve> landau_family(const Context& ctx) {
  std::vector<int> sizes = {6, 9, 12};
  if (ctx.full) sizes.push_back(15);
  return sweep_curves(ahm_config(ctx, sizes, "2/3", {30.0}, "landau")).at(30.0);
}

std::string sizes_str(std::span<const FsCurve> curves) {
  std::string s = "L=";
  for (const auto& c : curves) s += (s.size() > 2 ? "," : "") + std::to_string(c.sites());
  return s;
}

Outcome landau_collapse(const Context& ctx) {
  const auto curves = landau_family(ctx);
  const auto peaks = locate_peaks(curves);
  CollapseOptions o;
  o.nu_lo = 1.0;
  o.nu_hi = 4.0;
  const auto fit = collapse_fit(curves, peaks, o);
  const double tol_nu = ctx.full ? 0.2 : 0.35;
  const double tol_alpha = ctx.full ? 0.25 : 0.35;
  return combine({{"nu", fit.nu, fit.nu_stderr, 2.65, tol_nu},
                  {"mu", fit.mu, fit.mu_stderr, 5.3, 0.4},
                  {"alpha", fit.alpha, fit.alpha_stderr, 2.0, tol_alpha}},
                 sizes_str(curves));
}

std::vector<FsCurve> half_family(const Context& ctx, double U) {
  return sweep_curves(ahm_config(ctx, {6, 8, 10, 12}, "1", {30.0, 20.0, 10.0}, "half")).at(U);
}

Outcome kt_behaviour(const Context& ctx) {
  const auto curves = half_family(ctx, 30.0);
  const auto peaks = locate_peaks(curves);
  CollapseOptions o;
  o.nu_lo = -1.0;
  o.nu_hi = 0.5;
  const auto fit = collapse_fit(curves, peaks, o);
  const auto kt = fit_kt_form(curves, peaks);
  Vector L, excess;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    L.push_back(curves[i].sites());
    excess.push_back(peaks[i].chi_max - kt.a);
  }
  const auto growth = fit_power(L, excess);
  return combine({{"nu", fit.nu, fit.nu_stderr, -0.25, 0.1},
                  {"peak excess exponent", growth.exponent, growth.exponent_stderr, 1.0, 0.15}});
}

Outcome kt_coefficients(const Context& ctx) {
  const auto curves = half_family(ctx, 30.0);
  const auto kt = fit_kt_form(curves, locate_peaks(curves));
  return combine({{"b", kt.b, kt.b_stderr, 0.7478, 0.07478},
                  {"a", kt.a, kt.a_stderr, 3.855, 0.3 * 3.855},
                  {"c", kt.c, kt.c_stderr, 1349.9, 0.25 * 1349.9}},
                 "half width " + num(kt.half_width));
}

Outcome kt_critical_points(const Context& ctx) {
  const std::pair<double, double> targets[] = {{10.0, 0.308}, {20.0, 0.313}, {30.0, 0.317}};
  std::vector<Check> checks;
  Outcome o{true, {}};
  for (auto [U, tc] : targets) {
    const auto e = extrapolate_tc_kt(half_family(ctx, U));
    const Check c{"tc(U=" + num(U) + ")", e.tc, e.tc_stderr, tc, 0.015};
    o.pass = o.pass && c.pass();
    o.detail += (o.detail.empty() ? "" : "; ") + c.str();
  }
  return o;
}

Outcome landau_drift(const Context& ctx) {
  const auto curves = landau_family(ctx);
  const auto peaks = locate_peaks(curves);
  std::vector<int> sizes;
  Vector tmax;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    sizes.push_back(curves[i].sites());
    tmax.push_back(peaks[i].t_max);
  }
  const auto l2 = extrapolate_tc_power(sizes, tmax, 2.0);
  const auto l1 = extrapolate_tc_power(sizes, tmax, 1.0);
  return {l2.residual < l1.residual, "residual L^-2 " + num(l2.residual, 3) + " vs L^-1 " +
                                         num(l1.residual, 3) + ", tc(L^-2) = " + num(l2.tc) +
                                         " +- " + num(l2.tc_stderr, 2) + ", " + sizes_str(curves)};
}

DensityExponent ising_alpha() { return fs_density_exponent(1.05, 1.5, 4096); }

Outcome ising_lambda(const Context&) {
  const auto d = ising_alpha();
  HamiltonianFamily f(ModelParams::tfim(10, 0.5), DrivingTag::tfim_x_sum);
  const double ed = fs_finite_difference(f, 0.5).chi;
  const double rel = std::abs(fs_exact(0.5, 10) - ed) / ed;
  Outcome o = combine({{"slope", d.slope, d.slope_stderr, -1.0, 0.05}});
  o.pass = o.pass && rel <= 1e-6;
  o.detail += "; oracle vs ED at L=10, lambda=0.5: relative " + num(rel, 3) + " (limit 1e-06)";
  return o;
}

PowerFit ising_gamma_fit(const Context& ctx) {
  SweepConfig c;
  c.model = ModelKind::tfim;
  c.sizes = {16};
  c.driving = DrivingTag::tfim_z_sum;
  c.method = FsMethod::linear_response;
  for (int i = 0; i <= 14; ++i) c.grid.points.push_back(1.3 + 0.05 * i);
  c.cache_root = ctx.cache;
  c.output_dir = ctx.work / "ising_h";
  const auto curve = sweep_curves(c).begin()->second.front();
  Vector g, y;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    g.push_back(curve.grid[i] - 1.0);
    y.push_back(curve.chi[i] / 16.0);
  }
  return fit_power(g, y);
}

Outcome ising_gamma(const Context& ctx) {
  const auto fit = ising_gamma_fit(ctx);
  return combine({{"slope", fit.exponent, fit.exponent_stderr, -1.75, 0.2}},
                 "L=16, lambda-1 in [0.3, 1.0]");
}

Outcome exponent_relation(const Context& ctx) {
  const auto a = ising_alpha();
  const auto g = ising_gamma_fit(ctx);
  const auto rep = exponent_relation_report(-a.slope, a.slope_stderr, -g.exponent,
                                            g.exponent_stderr);
  return combine({{"alpha + 2 beta + gamma", rep.sum, rep.error, 3.0, 0.25}},
                 "alpha = " + num(rep.alpha) + ", gamma = " + num(rep.gamma));
}

Outcome particle_hole(const Context& ctx) {
  auto make = [&](int n, const std::string& tag) {
    SweepConfig c;
    c.sizes = {6};
    c.n_up = n;
    c.n_dn = n;
    c.U_values = {10.0};
    c.method = FsMethod::linear_response;
    c.grid.start = 0.05;
    c.grid.stop = 1.0;
    c.grid.count = 20;
    c.cache_root = ctx.cache;
    c.output_dir = ctx.work / tag;
    return sweep_curves(c).at(10.0).front();
  };
  const auto a = make(2, "ph4");
  const auto b = make(4, "ph8");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.chi[i] - b.chi[i]));
  return {worst <= 1e-8, "L=6, N=4 vs N=8 at U=10 over " + std::to_string(a.size()) +
                             " points, max |difference| " + num(worst, 3) + " (limit 1e-08)"};
}

Outcome determinism(const Context& ctx) {
  const fs::path root = ctx.work / "determinism";
  SweepConfig c;
  c.sizes = {6};
  c.filling = Filling::parse("2/3");
  c.U_values = {10.0};
  c.grid.start = 0.1;
  c.grid.stop = 0.9;
  c.grid.count = 17;
  c.output_dir = root / "out";
  c.cache_root = root / "cache";
  fs::remove_all(root);
  const auto first_file = run_sweep(c).curves.front().file;
  const auto first = read_text(first_file);
  fs::remove_all(root);
  const auto second = read_text(run_sweep(c).curves.front().file);

  const auto file = read_curve_file(first_file);
  const auto copy = root / "copy.csv";
  write_curve_file(copy, file);
  const auto back = read_curve_file(copy);
  bool exact = read_text(copy) == second && back.header == file.header &&
               back.rows.size() == file.rows.size();
  for (std::size_t i = 0; exact && i < back.rows.size(); ++i) {
    exact = std::memcmp(&back.rows[i].chi, &file.rows[i].chi, sizeof(double)) == 0 &&
            std::memcmp(&back.rows[i].t, &file.rows[i].t, sizeof(double)) == 0;
  }
  fs::remove_all(root);
  return {first == second && exact, std::string("rerun ") +
                                        (first == second ? "bit-identical" : "differs") +
                                        ", round trip " + (exact ? "exact" : "inexact")};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome(const Context&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "cross-method FS equivalence", cross_method},
      {2, "free-fermion null", free_fermion_null},
      {3, "Landau-class collapse (U=30, n=2/3)", landau_collapse},
      {4, "KT-class behaviour (U=30, n=1)", kt_behaviour},
      {5, "half-filling peak-form coefficients", kt_coefficients},
      {6, "KT critical points", kt_critical_points},
      {7, "Landau t_max drift", landau_drift},
      {8, "Ising lambda exponent", ising_lambda},
      {9, "Ising gamma from the h-driven FS", ising_gamma},
      {10, "exponent relation", exponent_relation},
      {11, "particle-hole symmetry", particle_hole},
      {12, "determinism and persistence", determinism},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critx acceptance checks"};
  std::vector<int> only;
  Context ctx;
  std::string cache = CRITX_ACCEPTANCE_CACHE;
  std::string work = (fs::temp_directory_path() / "critx-acceptance").string();
  app.add_option("-c,--criterion", only, "run only these criteria");
  app.add_flag("--full", ctx.full, "include L=15 in the n=2/3 family");
  app.add_option("--cache-dir", cache, "point cache shared by all sweeps");
  app.add_option("--work-dir", work, "scratch directory for curve files");
  CLI11_PARSE(app, argc, argv);
  ctx.cache = cache;
  ctx.work = work;

  int failures = 0;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::printf("criterion %2d %s: %s [%s] (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
