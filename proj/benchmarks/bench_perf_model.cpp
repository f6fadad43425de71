// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "fheprof/perf_model.hpp"

namespace {

using namespace fheprof;

struct Fixture {
  OpCountManifest manifest{"bench", {}};
  PrimitiveCostTable table;
  CostKey key{CryptoConfig{}, 4};

  explicit Fixture(int primitives) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < primitives; ++i) {
      const auto name = "Prim" + std::to_string(i);
      manifest.counts[name] = 1 + rng() % 10'000;
      table.set(key, name, {1e-4 * static_cast<double>(1 + rng() % 100), std::nullopt});
    }
  }
};

void BM_Predict(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(predict(f.manifest, f.table, f.key));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Predict)->RangeMultiplier(4)->Range(4, 256);

void BM_Geomean(benchmark::State& state) {
  std::vector<double> errors(static_cast<std::size_t>(state.range(0)));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  for (auto& e : errors) e = dist(rng);
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_geomean(errors));
}
BENCHMARK(BM_Geomean)->Range(8, 4096);

void BM_Cosine(benchmark::State& state) {
  std::vector<double> a(static_cast<std::size_t>(state.range(0))), b(a.size());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(0, 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = dist(rng);
    b[i] = dist(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(cosine_similarity(a, b));
}
BENCHMARK(BM_Cosine)->Range(8, 4096);

}  // namespace

BENCHMARK_MAIN();
