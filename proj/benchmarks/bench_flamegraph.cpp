// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "fheprof/flamegraph.hpp"

namespace {

using namespace fheprof;

std::vector<StackSample> random_samples(std::size_t n) {
  std::mt19937_64 rng(4);
  std::vector<StackSample> out(n);
  for (auto& s : out) {
    s.frames = {"main"};
    const auto depth = 1 + rng() % 12;
    for (std::size_t d = 0; d < depth; ++d) s.frames.push_back("fn" + std::to_string(rng() % 16));
    s.weight = 1 + rng() % 8;
  }
  return out;
}

std::string perf_script_text(std::size_t n) {
  std::ostringstream out;
  for (const auto& s : random_samples(n)) {
    out << "runner 1234 " << s.weight << " cycles:\n";
    for (auto it = s.frames.rbegin(); it != s.frames.rend(); ++it) {
      out << "\t    55d0c0de " << *it << "+0x10 (/usr/bin/runner)\n";
    }
    out << "\n";
  }
  return out.str();
}

void BM_ParsePerfScript(benchmark::State& state) {
  const auto text = perf_script_text(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    std::istringstream in(text);
    benchmark::DoNotOptimize(parse_perf_script(in));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParsePerfScript)->Range(64, 16384);

void BM_Ingest(benchmark::State& state) {
  const auto samples = random_samples(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ingest(samples));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ingest)->Range(64, 16384);

void BM_RenderSvg(benchmark::State& state) {
  const auto profile = ingest(random_samples(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(render_svg(profile));
}
BENCHMARK(BM_RenderSvg)->Range(64, 16384);

}  // namespace

BENCHMARK_MAIN();
