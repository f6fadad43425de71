// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "fheprof/denoise.hpp"
#include "fheprof/profiler.hpp"

namespace {

using namespace fheprof;

std::vector<MeasurementRecord> runs(std::size_t n) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(0.9, 1.1);
  std::vector<MeasurementRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].benchmark = "bench";
    out[i].run_index = static_cast<int>(i);
    out[i].wall_time = dist(rng);
    out[i].total_wall_time = out[i].wall_time;
    out[i].energy = 20.0 * dist(rng);
    out[i].event_counts = {{"instructions", 1e9 * dist(rng)}, {"cpu-cycles", 2e9 * dist(rng)}};
  }
  return out;
}

void BM_AggregateMedian(benchmark::State& state) {
  const auto records = runs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_median(records));
}
BENCHMARK(BM_AggregateMedian)->DenseRange(3, 15, 4);

void BM_DenoiseDerive(benchmark::State& state) {
  auto records = runs(2);
  records[1].phase = RunPhase::Setup;
  records[1].wall_time = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(derive(denoise(records[0], records[1])));
}
BENCHMARK(BM_DenoiseDerive);

}  // namespace

BENCHMARK_MAIN();
