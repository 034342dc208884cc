// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file sweep.hpp
 * @brief Sweep configuration and a resumable, cached runner that produces one
 *        FS curve file per (L, U) instance.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "critx/curve_io.hpp"
#include "critx/fidelity.hpp"
#include "critx/models.hpp"
#include "critx/scaling.hpp"

namespace critx {

/// Filling factor n = N / L as an exact fraction ("2/3", "1", "4/3").
struct Filling {
  int numerator = 1;
  int denominator = 1;

  [[nodiscard]] static Filling parse(std::string_view text);
  [[nodiscard]] std::string str() const;
  /// N = n L; throws ConfigError unless it is a non-negative even integer <= 2L.
  [[nodiscard]] int electrons(int sites) const;
};

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  Vector points;  ///< explicit list; overrides start/stop/count when non-empty
  bool refine = false;
  double refine_spacing = 0.002;
  double refine_half_width = 0.05;

  [[nodiscard]] Vector coarse() const;
  [[nodiscard]] std::string describe() const;
};

struct SweepConfig {
  ModelKind model = ModelKind::ahm;
  std::vector<int> sizes;
  std::optional<Filling> filling;  ///< balanced N_up = N_dn = N / 2
  std::optional<int> n_up;         ///< explicit sector override (both or neither)
  std::optional<int> n_dn;
  std::vector<double> U_values;
  double lambda = 0.0;  ///< TFIM transverse field when it is not the grid variable
  double h = 0.0;
  std::optional<DrivingTag> driving;  ///< defaults per model
  GridSpec grid;
  FsMethod method = FsMethod::finite_difference;
  double delta = 1e-3;
  double tol = 1e-10;
  double solve_tol = 1e-10;
  int max_iter = 20000;
  int max_basis = 32;
  BasisKind basis = BasisKind::product;  ///< AHM state space
  std::uint64_t seed = 20070424;
  int workers = 1;
  std::filesystem::path output_dir = "critx-out";
  std::filesystem::path cache_root;  ///< empty: $CRITX_CACHE or ./critx-cache

  /// Fills unset defaults (driving tag, default grid) and checks consistency.
  /// Throws ConfigError naming the offending field or size.
  void finalize();

  [[nodiscard]] DrivingTag driving_tag() const;
  [[nodiscard]] std::filesystem::path resolved_cache_root() const;
  [[nodiscard]] FidelityOptions fidelity_options() const;

  /// One ModelParams per (L, U) in the order sizes x U_values.
  [[nodiscard]] std::vector<ModelParams> instances() const;
};

[[nodiscard]] SweepConfig parse_sweep_config(std::string_view json_text);
[[nodiscard]] std::string sweep_config_json(const SweepConfig& config);

/// $CRITX_CACHE if set, else ./critx-cache.
[[nodiscard]] std::filesystem::path default_cache_root();

/// FS at one driving value, honouring the config's method and tolerances.
/// For the TFIM with driving tfim_z_sum, x is lambda and the response is to h at h = 0.
[[nodiscard]] FsPoint evaluate_point(const SweepConfig& config, const ModelParams& instance,
                                     double x);

/// Identifies a curve's cached points: hash of every field that changes the numbers.
[[nodiscard]] std::string curve_cache_key(const SweepConfig& config, const ModelParams& instance);

struct PointFailure {
  double x = 0.0;
  std::string message;
};

struct SweepCurveResult {
  std::filesystem::path file;
  FsCurve curve;
  std::vector<FsPoint> points;
  std::vector<PointFailure> failures;
  std::size_t computed = 0;
  std::size_t cached = 0;
};

struct SweepResult {
  std::vector<SweepCurveResult> curves;
  std::size_t computed = 0;
  std::size_t cached = 0;
  std::size_t failed = 0;
};

/// Evaluates every instance on its grid, reusing cached points, and writes one
/// curve file per instance into config.output_dir. Solver failures are
/// recorded per point; the sweep continues.
[[nodiscard]] SweepResult run_sweep(SweepConfig config, std::ostream* log = nullptr);

struct CacheEntry {
  std::filesystem::path directory;
  std::size_t points = 0;
};

[[nodiscard]] std::vector<CacheEntry> list_cache(const std::filesystem::path& root);
std::size_t clear_cache(const std::filesystem::path& root);

}  // namespace critx
