// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/curve_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

#include "critx/error.hpp"

namespace critx {
namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

FsCurve awkward_curve() {
  FsCurve c;
  c.params = ModelParams::ahm(9, 0.3, 30.0, 3, 3);
  c.params.basis = BasisKind::momentum_zero;
  c.method = FsMethod::linear_response;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  double t = 0.0;
  for (int i = 0; i < 50; ++i) {
    t += d(rng) * 0.1 + 1e-17;
    c.grid.push_back(t);
    c.chi.push_back(d(rng) * std::pow(10.0, 6.0 * d(rng)));
  }
  c.chi[3] = 0.0;
  c.chi[4] = 5e-324;  // subnormal
  c.metadata["seed"] = "20070424";
  c.metadata["note"] = "a b c";
  return c;
}

TEST(FormatDouble, RoundTripsEveryBit) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t bits = rng();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    EXPECT_TRUE(same_bits(parse_double(format_double(v)), v)) << format_double(v);
  }
  EXPECT_TRUE(std::isnan(parse_double("nan")));
  EXPECT_EQ(parse_double("-inf"), -INFINITY);
  EXPECT_THROW((void)parse_double("1.0x"), DomainError);
  EXPECT_THROW((void)parse_double(""), DomainError);
}

TEST(CurveFile, RoundTripIsBitExact) {
  const auto curve = awkward_curve();
  std::vector<FsPoint> points(curve.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    points[i].method = FsMethod::linear_response;
    points[i].residual = 1e-11 * static_cast<double>(i);
  }
  const auto file = to_curve_file(curve, points);
  const auto path = std::filesystem::path(testing::TempDir()) / "critx_roundtrip.csv";
  write_curve_file(path, file);
  const auto back = read_curve_file(path);
  EXPECT_EQ(back.header, file.header);
  ASSERT_EQ(back.rows.size(), file.rows.size());
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    EXPECT_TRUE(same_bits(back.rows[i].t, file.rows[i].t));
    EXPECT_TRUE(same_bits(back.rows[i].chi, file.rows[i].chi));
    EXPECT_TRUE(same_bits(back.rows[i].residual, file.rows[i].residual));
    EXPECT_TRUE(std::isnan(back.rows[i].delta_used));
    EXPECT_EQ(back.rows[i].method, FsMethod::linear_response);
  }

  const auto c2 = to_curve(back);
  EXPECT_EQ(c2.params.sites, 9);
  EXPECT_EQ(c2.params.n_up, 3);
  EXPECT_EQ(c2.params.bc.kind, BoundaryKind::periodic);
  EXPECT_EQ(c2.params.basis, BasisKind::momentum_zero);
  EXPECT_EQ(c2.params.U, 30.0);
  EXPECT_EQ(c2.tag, DrivingTag::ahm_down_hop);
  EXPECT_EQ(c2.metadata, curve.metadata);
  for (std::size_t i = 0; i < c2.size(); ++i) {
    EXPECT_TRUE(same_bits(c2.grid[i], curve.grid[i]));
    EXPECT_TRUE(same_bits(c2.chi[i], curve.chi[i]));
  }
  EXPECT_EQ(format_curve_file(back), read_text(path));
  std::filesystem::remove(path);
}

TEST(CurveFile, TfimHeader) {
  FsCurve c;
  c.params = ModelParams::tfim(16, 0.0, 0.0);
  c.tag = DrivingTag::tfim_z_sum;
  c.method = FsMethod::linear_response;
  c.grid = {1.3, 1.4};
  c.chi = {0.2, 0.1};
  const auto back = to_curve(parse_curve_file(format_curve_file(to_curve_file(c))));
  EXPECT_EQ(back.params.kind, ModelKind::tfim);
  EXPECT_EQ(back.params.sites, 16);
  EXPECT_EQ(back.tag, DrivingTag::tfim_z_sum);
  EXPECT_EQ(back.chi, c.chi);
}

TEST(CurveFile, RejectsMalformedText) {
  EXPECT_THROW((void)parse_curve_file("t,chi\n"), DomainError);
  EXPECT_THROW((void)parse_curve_file("# critx-curve v1\n# model=ahm\n"), DomainError);
  EXPECT_THROW((void)parse_curve_file("# critx-curve v1\nt,chi,method,delta_used,residual\n0.1,2\n"),
               DomainError);
  EXPECT_THROW((void)parse_curve_file("# critx-curve v1\n# novalue\nt,chi,method,delta_used,residual\n"),
               DomainError);
  const auto ok = parse_curve_file(
      "# critx-curve v1\n# model=tfim\nt,chi,method,delta_used,residual\n");
  EXPECT_THROW((void)to_curve(ok), DomainError);  // missing L
}

TEST(ContentHash, KnownValues) {
  EXPECT_EQ(content_hash(""), "cbf29ce484222325");
  EXPECT_EQ(content_hash("a"), "af63dc4c8601ec8c");
  EXPECT_NE(content_hash("ab"), content_hash("ba"));
}

}  // namespace
}  // namespace critx
