// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

// critx command-line driver: sweep, fs, analyze, cache.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "critx/analysis.hpp"
#include "critx/curve_io.hpp"
#include "critx/error.hpp"
#include "critx/sweep.hpp"
#include "critx/version.hpp"

namespace {

enum Exit : int { kOk = 0, kConfig = 1, kSolver = 2, kRefusal = 3 };

struct SweepFlags {
  std::string config_file;
  std::optional<std::string> model, filling, driving, method, output_dir, cache_dir, basis;
  std::vector<int> sizes;
  std::vector<double> U, grid_points;
  std::optional<int> n_up, n_dn, grid_count, max_iter, max_basis, workers;
  std::optional<double> lambda, h, grid_start, grid_stop, delta, tol, solve_tol;
  std::optional<std::uint64_t> seed;
  bool refine = false;
  bool no_refine = false;
};

void add_sweep_flags(CLI::App* app, SweepFlags& f) {
  app->add_option("--config", f.config_file, "JSON config file; flags override its fields");
  app->add_option("--model", f.model, "ahm or tfim");
  app->add_option("--L", f.sizes, "system sizes")->delimiter(',');
  app->add_option("--filling", f.filling, "AHM filling n = N/L, e.g. 2/3");
  app->add_option("--n-up", f.n_up, "explicit spin-up count (overrides filling)");
  app->add_option("--n-dn", f.n_dn, "explicit spin-down count (overrides filling)");
  app->add_option("--U", f.U, "AHM interaction strengths")->delimiter(',');
  app->add_option("--lambda", f.lambda, "TFIM transverse field (fixed when h-driven)");
  app->add_option("--h-field", f.h, "TFIM longitudinal field h");
  app->add_option("--driving", f.driving, "ahm_down_hop, tfim_x_sum or tfim_z_sum");
  app->add_option("--grid-start", f.grid_start);
  app->add_option("--grid-stop", f.grid_stop);
  app->add_option("--grid-count", f.grid_count);
  app->add_option("--grid-points", f.grid_points, "explicit grid")->delimiter(',');
  app->add_flag("--refine", f.refine, "refine around the coarse maximum");
  app->add_flag("--no-refine", f.no_refine);
  app->add_option("--method", f.method, "finite_difference, spectral_sum or linear_response");
  app->add_option("--delta", f.delta, "finite-difference step");
  app->add_option("--tol", f.tol, "Lanczos residual tolerance");
  app->add_option("--solve-tol", f.solve_tol, "linear-response solve tolerance");
  app->add_option("--max-iter", f.max_iter);
  app->add_option("--max-basis", f.max_basis, "Krylov basis size before restart");
  app->add_option("--seed", f.seed);
  app->add_option("--basis", f.basis, "AHM state space: product (default) or momentum_zero");
  app->add_option("--workers", f.workers, "concurrent grid points");
  app->add_option("--output-dir", f.output_dir);
  app->add_option("--cache-dir", f.cache_dir, "cache root (default $CRITX_CACHE or ./critx-cache)");
}

critx::SweepConfig build_config(const SweepFlags& f) {
  critx::SweepConfig c;
  if (!f.config_file.empty()) c = critx::parse_sweep_config(critx::read_text(f.config_file));
  try {
    if (f.model) c.model = critx::parse_model_kind(*f.model);
    if (!f.sizes.empty()) c.sizes = f.sizes;
    if (f.filling) c.filling = critx::Filling::parse(*f.filling);
    if (f.n_up) c.n_up = f.n_up;
    if (f.n_dn) c.n_dn = f.n_dn;
    if (!f.U.empty()) c.U_values = f.U;
    if (f.lambda) c.lambda = *f.lambda;
    if (f.h) c.h = *f.h;
    if (f.driving) c.driving = critx::parse_driving_tag(*f.driving);
    if (f.grid_start || f.grid_stop || f.grid_count) c.grid.points.clear();
    if (f.grid_start) c.grid.start = *f.grid_start;
    if (f.grid_stop) c.grid.stop = *f.grid_stop;
    if (f.grid_count) c.grid.count = *f.grid_count;
    if (!f.grid_points.empty()) c.grid.points = f.grid_points;
    if (f.refine) c.grid.refine = true;
    if (f.no_refine) c.grid.refine = false;
    if (f.method) c.method = critx::parse_fs_method(*f.method);
    if (f.delta) c.delta = *f.delta;
    if (f.tol) c.tol = *f.tol;
    if (f.solve_tol) c.solve_tol = *f.solve_tol;
    if (f.max_iter) c.max_iter = *f.max_iter;
    if (f.max_basis) c.max_basis = *f.max_basis;
    if (f.seed) c.seed = *f.seed;
    if (f.basis) c.basis = critx::parse_basis_kind(*f.basis);
    if (f.workers) c.workers = *f.workers;
    if (f.output_dir) c.output_dir = *f.output_dir;
    if (f.cache_dir) c.cache_root = *f.cache_dir;
  } catch (const critx::DomainError& e) {
    throw critx::ConfigError(e.what());
  }
  return c;
}

int run_sweep_command(const SweepFlags& f) {
  const auto result = critx::run_sweep(build_config(f), &std::cerr);
  for (const auto& c : result.curves) {
    for (const auto& fail : c.failures) {
      std::cerr << "failed: L=" << c.curve.sites() << " x=" << fail.x << ": " << fail.message
                << '\n';
    }
    if (!c.curve.grid.empty()) std::cout << c.file.string() << '\n';
  }
  return result.failed > 0 ? kSolver : kOk;
}

int run_fs_command(const SweepFlags& f, double x) {
  auto config = build_config(f);
  if (config.sizes.size() != 1) throw critx::ConfigError("fs: give exactly one L");
  if (config.model == critx::ModelKind::ahm && config.U_values.size() != 1) {
    throw critx::ConfigError("fs: give exactly one U");
  }
  config.grid.points = {x};
  config.grid.refine = false;
  config.finalize();
  const auto instance = config.instances().front();
  const auto p = critx::evaluate_point(config, instance, x);
  nlohmann::ordered_json j{{"model", critx::to_string(instance.kind)},
                           {"L", instance.sites},
                           {"driving", critx::to_string(config.driving_tag())},
                           {"x", p.x},
                           {"chi", p.chi},
                           {"method", critx::to_string(p.method)},
                           {"residual", p.residual},
                           {"gap_estimate", p.gap_estimate},
                           {"iterations", p.iterations}};
  if (std::isfinite(p.delta_used)) {
    j["delta_used"] = p.delta_used;
    j["chi_delta"] = p.chi_delta;
    j["chi_half_delta"] = p.chi_half_delta;
  }
  std::cout << j.dump(2) << '\n';
  return kOk;
}

struct AnalyzeFlags {
  std::string command;
  std::vector<std::string> inputs;
  std::string out = "-";
  std::string plot_dir;
  critx::AnalysisOptions options;
  std::optional<double> nu_lo, nu_hi, window_lo, window_hi;
};

int run_analyze_command(AnalyzeFlags& f) {
  auto opts = f.options;
  opts.nu_lo = f.nu_lo;
  opts.nu_hi = f.nu_hi;
  opts.window_lo = f.window_lo;
  opts.window_hi = f.window_hi;
  std::vector<std::filesystem::path> paths(f.inputs.begin(), f.inputs.end());
  const auto out = critx::analyze(critx::parse_analysis_command(f.command), paths, opts);
  if (f.out == "-") {
    std::cout << out.json;
  } else {
    critx::write_text_atomic(f.out, out.json);
  }
  if (!f.plot_dir.empty()) {
    std::filesystem::create_directories(f.plot_dir);
    for (const auto& [name, content] : out.plots) {
      critx::write_text_atomic(std::filesystem::path(f.plot_dir) / name, content);
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critx: fidelity susceptibility by exact diagonalization"};
  app.set_version_flag("--version", std::string(critx::kVersion));
  app.require_subcommand(1);

  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "evaluate FS curves over a driving grid");
  add_sweep_flags(sweep, sweep_flags);

  SweepFlags fs_flags;
  double fs_x = 0.0;
  auto* fs = app.add_subcommand("fs", "FS at a single driving value");
  add_sweep_flags(fs, fs_flags);
  fs->add_option("--at", fs_x, "driving value (t for AHM, lambda for TFIM)")->required();

  AnalyzeFlags an;
  auto* analyze = app.add_subcommand("analyze", "fits over curve files");
  analyze->add_option("command", an.command, "peak|collapse|ktform|tc-landau|tc-kt|oracle|relation")
      ->required();
  analyze->add_option("inputs", an.inputs, "curve files");
  analyze->add_option("--out", an.out, "result JSON path ('-' for stdout)");
  analyze->add_option("--plot-dir", an.plot_dir, "directory for plot-data CSV files");
  analyze->add_option("--nu-lo", an.nu_lo);
  analyze->add_option("--nu-hi", an.nu_hi);
  analyze->add_option("--y-window", an.options.collapse.y_window);
  analyze->add_option("--t-window", an.options.collapse.t_window);
  analyze->add_option("--neighbours", an.options.collapse.neighbours);
  analyze->add_option("--half-width", an.options.kt_half_width, "ktform window");
  analyze->add_flag("--refine-peaks", an.options.refine_peaks);
  analyze->add_option("--lambda-start", an.options.lambda_start);
  analyze->add_option("--lambda-stop", an.options.lambda_stop);
  analyze->add_option("--lambda-count", an.options.lambda_count);
  analyze->add_option("--oracle-L", an.options.oracle_sites);
  analyze->add_option("--window-lo", an.window_lo, "density-exponent window");
  analyze->add_option("--window-hi", an.window_hi);
  analyze->add_option("--density-L", an.options.density_sites);
  analyze->add_option("--alpha", an.options.alpha);
  analyze->add_option("--alpha-err", an.options.alpha_err);
  analyze->add_option("--gamma", an.options.gamma);
  analyze->add_option("--gamma-err", an.options.gamma_err);

  std::string cache_action;
  std::string cache_dir;
  auto* cache = app.add_subcommand("cache", "inspect or clear the point cache");
  cache->add_option("action", cache_action, "ls or clear")
      ->required()
      ->check(CLI::IsMember({"ls", "clear"}));
  cache->add_option("--cache-dir", cache_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*sweep) return run_sweep_command(sweep_flags);
    if (*fs) return run_fs_command(fs_flags, fs_x);
    if (*analyze) return run_analyze_command(an);
    if (*cache) {
      const std::filesystem::path root =
          cache_dir.empty() ? critx::default_cache_root() : std::filesystem::path(cache_dir);
      if (cache_action == "ls") {
        for (const auto& e : critx::list_cache(root)) {
          std::cout << e.directory.string() << '\t' << e.points << '\n';
        }
      } else {
        std::cout << "removed " << critx::clear_cache(root) << " points\n";
      }
      return kOk;
    }
  } catch (const critx::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const critx::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const critx::AnalysisRefusal& e) {
    std::cerr << "analysis refused: " << e.what() << '\n';
    return kRefusal;
  } catch (const critx::ConvergenceError& e) {
    std::cerr << "solver failure: " << e.what() << " (best residual " << e.best_residual()
              << ")\n";
    return kSolver;
  } catch (const critx::DegeneracyError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
