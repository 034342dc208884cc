// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/sweep.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "critx/curve_io.hpp"
#include "critx/error.hpp"

namespace critx {
namespace {

namespace fs = std::filesystem;

class SweepTest : public testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::path(testing::TempDir()) /
            ("critx_sweep_" + std::string(testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  SweepConfig small(const std::string& tag = "a") const {
    SweepConfig c;
    c.sizes = {6};
    c.filling = Filling::parse("2/3");
    c.U_values = {10.0};
    c.grid.start = 0.1;
    c.grid.stop = 0.9;
    c.grid.count = 17;
    c.output_dir = root_ / ("out_" + tag);
    c.cache_root = root_ / ("cache_" + tag);
    return c;
  }

  fs::path root_;
};

std::vector<fs::path> point_files(const fs::path& cache) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(cache)) {
    if (e.path().extension() == ".pt") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Filling, ParseAndResolve) {
  const auto f = Filling::parse("2/3");
  EXPECT_EQ(f.str(), "2/3");
  EXPECT_EQ(f.electrons(6), 4);
  EXPECT_EQ(f.electrons(15), 10);
  EXPECT_EQ(Filling::parse("1").electrons(8), 8);
  EXPECT_THROW((void)f.electrons(7), ConfigError);
  EXPECT_EQ(f.electrons(3), 2);
  EXPECT_THROW((void)Filling::parse("1").electrons(7), ConfigError);
  EXPECT_THROW((void)Filling::parse("two thirds"), ConfigError);
}

TEST_F(SweepTest, SeventeenRowCurve) {
  const auto r = run_sweep(small());
  ASSERT_EQ(r.curves.size(), 1u);
  EXPECT_EQ(r.computed, 17u);
  EXPECT_EQ(r.failed, 0u);
  const auto file = read_curve_file(r.curves[0].file);
  EXPECT_EQ(file.rows.size(), 17u);
  EXPECT_EQ(file.header.at("L"), "6");
  EXPECT_EQ(file.header.at("n_up"), "2");
  EXPECT_EQ(file.header.at("n_dn"), "2");
  EXPECT_EQ(file.header.at("bc"), "antiperiodic");
  EXPECT_EQ(file.header.at("filling"), "2/3");
  EXPECT_EQ(file.header.at("seed"), "20070424");
  EXPECT_NEAR(file.rows.front().t, 0.1, 1e-15);
  EXPECT_NEAR(file.rows.back().t, 0.9, 1e-15);
  for (const auto& row : file.rows) EXPECT_GT(row.chi, 0.0);
}

TEST_F(SweepTest, ResumeRecomputesOnlyMissingPoints) {
  const auto cfg = small();
  const auto first = run_sweep(cfg);
  const auto before = read_text(first.curves[0].file);
  auto files = point_files(cfg.cache_root);
  ASSERT_EQ(files.size(), 17u);
  for (int i : {2, 8, 15}) fs::remove(files[i]);

  const auto second = run_sweep(cfg);
  EXPECT_EQ(second.computed, 3u);
  EXPECT_EQ(second.cached, 14u);
  EXPECT_EQ(read_text(second.curves[0].file), before);
}

TEST_F(SweepTest, RerunsAreIdentical) {
  const auto cfg = small();
  const auto first = read_text(run_sweep(cfg).curves[0].file);
  fs::remove_all(cfg.output_dir);
  fs::remove_all(cfg.cache_root);
  const auto r = run_sweep(cfg);
  EXPECT_EQ(r.computed, 17u);
  EXPECT_EQ(read_text(r.curves[0].file), first);
}

TEST_F(SweepTest, WorkerCountDoesNotChangeData) {
  auto b = small("b");
  b.workers = 3;
  const auto ra = run_sweep(small("a"));
  const auto rb = run_sweep(b);
  EXPECT_EQ(read_curve_file(ra.curves[0].file).rows.size(), 17u);
  const auto fa = read_curve_file(ra.curves[0].file);
  const auto fb = read_curve_file(rb.curves[0].file);
  for (std::size_t i = 0; i < fa.rows.size(); ++i) {
    EXPECT_EQ(fa.rows[i].chi, fb.rows[i].chi);
    EXPECT_EQ(fa.rows[i].residual, fb.rows[i].residual);
  }
  EXPECT_EQ(ra.curves[0].file.filename(), rb.curves[0].file.filename());
}

TEST_F(SweepTest, PeriodicRecordedForSixElectrons) {
  auto cfg = small();
  cfg.sizes = {9};
  cfg.grid.count = 3;
  const auto r = run_sweep(cfg);
  const auto file = read_curve_file(r.curves[0].file);
  EXPECT_EQ(file.header.at("n_up"), "3");
  EXPECT_EQ(file.header.at("bc"), "periodic");
}

TEST_F(SweepTest, UnresolvableFillingNamesSize) {
  auto cfg = small();
  cfg.sizes = {6, 7};
  try {
    cfg.finalize();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("L = 7"), std::string::npos) << e.what();
  }
}

TEST_F(SweepTest, CacheKeyTracksPhysics) {
  auto a = small();
  a.finalize();
  auto b = a;
  b.delta = 2e-3;
  auto c = a;
  c.output_dir = root_ / "elsewhere";
  c.workers = 4;
  const auto inst = a.instances().front();
  EXPECT_NE(curve_cache_key(a, inst), curve_cache_key(b, inst));
  EXPECT_EQ(curve_cache_key(a, inst), curve_cache_key(c, inst));
  auto other = inst;
  other.U = 20.0;
  EXPECT_NE(curve_cache_key(a, inst), curve_cache_key(a, other));
}

TEST_F(SweepTest, DefaultGridRefinesAroundPeak) {
  auto cfg = small();
  cfg.grid = GridSpec{};
  cfg.method = FsMethod::linear_response;
  cfg.finalize();
  EXPECT_TRUE(cfg.grid.refine);
  EXPECT_NEAR(cfg.grid.start, 0.04, 1e-15);
  EXPECT_NEAR(cfg.grid.stop, 1.0, 1e-15);
  EXPECT_EQ(cfg.grid.count, 49);
  const auto r = run_sweep(cfg);
  const auto& grid = r.curves[0].curve.grid;
  EXPECT_GT(grid.size(), 49u);
  std::size_t arg = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (r.curves[0].curve.chi[i] > r.curves[0].curve.chi[arg]) arg = i;
  }
  EXPECT_NEAR(grid[arg + 1] - grid[arg], 0.002, 1e-9);
}

TEST(SweepConfigJson, RoundTrip) {
  auto c = SweepConfig{};
  c.sizes = {6, 9};
  c.filling = Filling::parse("2/3");
  c.U_values = {10, 30};
  c.method = FsMethod::linear_response;
  c.basis = BasisKind::momentum_zero;
  c.finalize();
  const auto back = parse_sweep_config(sweep_config_json(c));
  EXPECT_EQ(back.sizes, c.sizes);
  EXPECT_EQ(back.U_values, c.U_values);
  EXPECT_EQ(back.method, c.method);
  EXPECT_EQ(back.basis, c.basis);
  EXPECT_EQ(back.filling->str(), "2/3");
  EXPECT_EQ(sweep_config_json(back), sweep_config_json(c));
  EXPECT_THROW((void)parse_sweep_config("{\"sizes\": \"six\"}"), ConfigError);
}

TEST(Cache, ListAndClear) {
  const auto root = fs::path(testing::TempDir()) / "critx_cache_list";
  fs::remove_all(root);
  SweepConfig c;
  c.model = ModelKind::tfim;
  c.sizes = {6};
  c.grid.points = {0.5, 0.8};
  c.output_dir = root / "out";
  c.cache_root = root / "cache";
  (void)run_sweep(c);
  const auto entries = list_cache(c.cache_root);
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].points, 2u);
  EXPECT_EQ(clear_cache(c.cache_root), 2u);
  EXPECT_TRUE(list_cache(c.cache_root).empty());
  fs::remove_all(root);
}

}  // namespace
}  // namespace critx
