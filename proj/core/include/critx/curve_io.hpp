// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file curve_io.hpp
 * @brief Text persistence for FS curves.
 *
 * A curve file is CSV with a block of "# key=value" header lines:
 *
 *     # critx-curve v1
 *     # model=ahm
 *     # L=6
 *     ...
 *     t,chi,method,delta_used,residual
 *     0.10000000000000001,3.1845...,finite_difference,0.001,3.2e-12
 *
 * Doubles are written with 17 significant digits so that reading a file back
 * reproduces every value bit for bit.
 */

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "critx/fidelity.hpp"
#include "critx/scaling.hpp"

namespace critx {

struct CurveRow {
  double t = 0.0;
  double chi = 0.0;
  FsMethod method = FsMethod::finite_difference;
  double delta_used = std::numeric_limits<double>::quiet_NaN();
  double residual = 0.0;
};

struct CurveFile {
  std::map<std::string, std::string> header;
  std::vector<CurveRow> rows;
};

/// Round-trip formatting of a double (17 significant digits, "nan"/"inf" spelled out).
[[nodiscard]] std::string format_double(double v);
[[nodiscard]] double parse_double(std::string_view text);

/// Header keys that encode ModelParams and the curve's tag and method.
[[nodiscard]] std::map<std::string, std::string> params_header(const ModelParams& p,
                                                               DrivingTag tag, FsMethod method);

[[nodiscard]] CurveFile to_curve_file(const FsCurve& curve, const std::vector<FsPoint>& points = {});
[[nodiscard]] FsCurve to_curve(const CurveFile& file);

[[nodiscard]] std::string format_curve_file(const CurveFile& file);
[[nodiscard]] CurveFile parse_curve_file(std::string_view text);

/// Write to a temporary sibling and rename into place.
void write_text_atomic(const std::filesystem::path& path, std::string_view text);
[[nodiscard]] std::string read_text(const std::filesystem::path& path);

void write_curve_file(const std::filesystem::path& path, const CurveFile& file);
[[nodiscard]] CurveFile read_curve_file(const std::filesystem::path& path);

/// 64-bit FNV-1a digest, printed as 16 hex digits.
[[nodiscard]] std::string content_hash(std::string_view text);

}  // namespace critx
