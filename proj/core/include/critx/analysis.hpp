// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file analysis.hpp
 * @brief Analysis commands over curve files: structured JSON results plus
 *        plot-data CSV files.
 */
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "critx/curve_io.hpp"
#include "critx/scaling.hpp"

namespace critx {

enum class AnalysisCommand { peak, collapse, ktform, tc_landau, tc_kt, oracle, relation };

[[nodiscard]] std::string_view to_string(AnalysisCommand command) noexcept;
[[nodiscard]] AnalysisCommand parse_analysis_command(std::string_view text);

/// A parsed input curve with its provenance.
struct AnalysisInput {
  std::filesystem::path path;
  CurveFile file;
  FsCurve curve;
  std::string content_hash;  ///< digest of the file bytes
};

[[nodiscard]] AnalysisInput load_input(const std::filesystem::path& path);

struct RelationReport {
  double alpha = 0.0;
  double beta = 0.125;
  double gamma = 0.0;
  double sum = 0.0;        ///< alpha + 2 beta + gamma
  double deviation = 0.0;  ///< sum - 3
  double error = 0.0;      ///< sqrt(alpha_err^2 + gamma_err^2)
};

[[nodiscard]] RelationReport exponent_relation_report(double alpha, double alpha_err,
                                                      double gamma, double gamma_err);

struct AnalysisOptions {
  CollapseOptions collapse;
  /// Unset: [1, 4] away from half filling, [-1, 0.5] at half filling.
  std::optional<double> nu_lo;
  std::optional<double> nu_hi;
  double kt_half_width = 0.05;
  /// Re-evaluate chi at parabola vertices using the physics recorded in the
  /// input headers.
  bool refine_peaks = false;

  // oracle
  double lambda_start = 0.1;
  double lambda_stop = 3.0;
  int lambda_count = 59;
  int oracle_sites = 16;
  std::optional<double> window_lo;  ///< density-exponent window, both or neither
  std::optional<double> window_hi;
  int density_sites = 4096;

  // relation
  double alpha = 1.0;
  double alpha_err = 0.0;
  double gamma = 1.75;
  double gamma_err = 0.0;
};

struct AnalysisOutput {
  std::string json;                           ///< result document
  std::map<std::string, std::string> plots;   ///< file name -> CSV content
};

/// Runs one analysis command. Throws AnalysisRefusal when the inputs cannot
/// support the requested fit (mixed models, too few sizes, boundary peaks).
[[nodiscard]] AnalysisOutput analyze(AnalysisCommand command,
                                     std::span<const std::filesystem::path> inputs,
                                     const AnalysisOptions& options = {});

/// Peaks for a set of curves, one find_peak call per curve.
[[nodiscard]] std::vector<PeakEstimate> locate_peaks(std::span<const FsCurve> curves,
                                                     bool refine = false);

}  // namespace critx
