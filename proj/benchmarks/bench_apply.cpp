// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "critx/eigensolver.hpp"
#include "critx/models.hpp"

namespace {

void BM_AhmApply(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const int N = 2 * L / 3;
  const auto H = critx::make_hamiltonian(critx::ModelParams::ahm(L, 0.36, 30.0, N / 2, N / 2));
  critx::Vector in(H->dimension(), 1.0);
  critx::Vector out(H->dimension());
  for (auto _ : state) {
    H->apply(in, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(H->dimension()));
}
BENCHMARK(BM_AhmApply)->Arg(9)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_TfimApply(benchmark::State& state) {
  const auto H = critx::make_hamiltonian(critx::ModelParams::tfim(static_cast<int>(state.range(0)), 0.7));
  critx::Vector in(H->dimension(), 1.0);
  critx::Vector out(H->dimension());
  for (auto _ : state) {
    H->apply(in, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(H->dimension()));
}
BENCHMARK(BM_TfimApply)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_GroundState(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const int N = 2 * L / 3;
  const auto H = critx::make_hamiltonian(critx::ModelParams::ahm(L, 0.36, 30.0, N / 2, N / 2));
  for (auto _ : state) {
    auto gs = critx::ground_state(H->as_map(), H->dimension());
    benchmark::DoNotOptimize(gs.E0);
  }
}
BENCHMARK(BM_GroundState)->Arg(9)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
