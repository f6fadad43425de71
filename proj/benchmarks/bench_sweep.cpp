// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "fheprof/registry.hpp"
#include "fheprof/sweep.hpp"

namespace {

using namespace fheprof;

void BM_GenerateSweep(benchmark::State& state) {
  const auto registry = Registry::load(Registry::default_dir());
  SweepSpec spec;
  for (const auto& name : registry.primitive_names()) spec.benchmarks.push_back(name);
  spec.log2_ring_dims = std::vector<int>{15, 16, 17};
  spec.depths = std::vector<int>{5, 10, 15};
  spec.thread_counts = {1, 2, 4, 8};
  for (auto _ : state) benchmark::DoNotOptimize(serialize_plan(generate_sweep(spec, registry)));
}
BENCHMARK(BM_GenerateSweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
