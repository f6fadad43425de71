// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include "fheprof/errors.hpp"

namespace fheprof {

SyntheticCostModel SyntheticCostModel::default_model() {
  SyntheticCostModel model;
  model.base_costs = {
      {"EvalAdd", 0.0002},
      {"EvalAdd(Plaintext)", 0.0002},
      {"EvalSub", 0.0002},
      {"EvalSub(Scalar)", 0.0001},
      {"EvalMult", 0.004},
      {"EvalMultNoRelin", 0.0015},
      {"EvalMult(Plaintext)", 0.0008},
      {"EvalMult(Scalar)", 0.0003},
      {"EvalSquare", 0.0035},
      {"EvalRotate", 0.0035},
      {"EvalFastRotate", 0.002},
      {"EvalBootstrap", 0.9},
      {"EvalChebyshevFunction", 0.15},
      {"EvalChebyshevSeries", 0.12},
  };
  return model;
}

void SyntheticCostModel::validate() const {
  for (const auto& [name, cost] : base_costs) {
    if (!(cost > 0.0) || !std::isfinite(cost)) {
      throw ArgumentError("synthetic base cost for '" + name + "' must be > 0");
    }
  }
  if (!(noise_amplitude >= 0.0 && noise_amplitude <= 0.05)) {
    throw ArgumentError("synthetic noise amplitude must lie in [0, 0.05]");
  }
  if (saturation_threads < 1) throw ArgumentError("saturation point must be >= 1");
  if (!(setup_seconds >= 0.0)) throw ArgumentError("setup cost must be >= 0");
}

double SyntheticCostModel::scale(const CryptoConfig& config, int threads) const {
  const double ring = std::pow(std::ldexp(1.0, config.log2_ring_dim - 16), ring_exponent);
  const double depth = std::pow(static_cast<double>(config.depth) / 10.0, depth_exponent);
  const int effective = std::min(std::max(threads, 1), saturation_threads);
  return ring * depth / static_cast<double>(effective);
}

double SyntheticCostModel::per_call_seconds(const std::string& primitive,
                                            const CryptoConfig& config, int threads) const {
  const auto it = base_costs.find(primitive);
  if (it == base_costs.end()) {
    throw ProtocolError("synthetic model has no cost for primitive '" + primitive + "'");
  }
  return it->second * scale(config, threads);
}

double SyntheticCostModel::modeled_roi_seconds(const OpCountManifest& manifest,
                                               const CryptoConfig& config, int threads) const {
  double total = 0.0;
  for (const auto& [primitive, count] : manifest.counts) {
    if (count == 0) continue;
    total += static_cast<double>(count) * per_call_seconds(primitive, config, threads);
  }
  return total;
}

void to_json(nlohmann::json& j, const SyntheticCostModel& model) {
  j = nlohmann::json{{"base_costs", model.base_costs},
                     {"ring_exponent", model.ring_exponent},
                     {"depth_exponent", model.depth_exponent},
                     {"saturation_threads", model.saturation_threads},
                     {"noise_amplitude", model.noise_amplitude},
                     {"setup_seconds", model.setup_seconds}};
  if (model.seed) j["seed"] = *model.seed;
}

void from_json(const nlohmann::json& j, SyntheticCostModel& model) {
  try {
    model.base_costs = j.at("base_costs").get<std::map<std::string, double>>();
    model.ring_exponent = j.value("ring_exponent", 1.0);
    model.depth_exponent = j.value("depth_exponent", 1.0);
    model.saturation_threads = j.value("saturation_threads", 8);
    model.noise_amplitude = j.value("noise_amplitude", 0.0);
    model.setup_seconds = j.value("setup_seconds", 0.02);
    if (j.contains("seed") && !j.at("seed").is_null()) model.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("synthetic model: ") + e.what());
  }
}

void busy_spin(std::chrono::duration<double> duration) {
  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(duration);
  // Arithmetic keeps the core retiring instructions so PMU counts track the work.
  volatile double sink = 1.0;
  while (clock::now() < deadline) {
    for (int i = 0; i < 64; ++i) sink = sink * 1.0000001 + 1e-9;
  }
}

OpCountManifest synthetic_roi_manifest(const Registry& registry, const std::string& benchmark,
                                       std::uint64_t repetitions,
                                       const nlohmann::json& extra_params) {
  if (registry.is_primitive(benchmark)) {
    return OpCountManifest{benchmark, {{benchmark, repetitions}}};
  }
  if (repetitions != 1) {
    throw ProtocolError("application '" + benchmark + "' must run with --reps 1");
  }
  if (extra_params.is_object() && extra_params.contains("manifest")) {
    auto manifest = extra_params.at("manifest").get<OpCountManifest>();
    manifest.benchmark = benchmark;
    return manifest;
  }
  return registry.get_manifest(benchmark);
}

SelfReport synthetic_execute(const RunnerInvocation& invocation, const SyntheticCostModel& model,
                             const OpCountManifest& roi_manifest) {
  model.validate();
  // Reject unknown primitives before consuming any time.
  const double modeled =
      model.modeled_roi_seconds(roi_manifest, invocation.config, invocation.thread_count);

  busy_spin(std::chrono::duration<double>(model.setup_seconds));

  SelfReport report;
  report.benchmark = invocation.benchmark;
  report.phase = invocation.phase;
  report.repetitions_executed = invocation.repetitions;
  if (invocation.phase == RunPhase::Setup) {
    report.dynamic_counts = std::map<std::string, std::uint64_t>{};
    return report;
  }

  double noise = 0.0;
  if (model.noise_amplitude > 0.0) {
    std::mt19937_64 rng(model.seed ? *model.seed : std::random_device{}());
    noise = std::uniform_real_distribution<double>(-model.noise_amplitude,
                                                   model.noise_amplitude)(rng);
  }
  const auto start = std::chrono::steady_clock::now();
  busy_spin(std::chrono::duration<double>(modeled * (1.0 + noise)));
  report.inner_roi_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::map<std::string, std::uint64_t> counts;
  for (const auto& [p, n] : roi_manifest.counts) {
    if (n > 0) counts[p] = n;
  }
  report.dynamic_counts = std::move(counts);
  return report;
}

int synthetic_runner_main(int argc, const char* const* argv) {
  try {
    const auto args = parse_runner_args(argc, argv);
    const auto file = read_runner_config(args.config_path);

    SyntheticCostModel model = SyntheticCostModel::default_model();
    const auto& extra = file.extra_params;
    if (extra.contains("synthetic_model_path")) {
      std::ifstream in(extra.at("synthetic_model_path").get<std::string>());
      if (!in) throw IoError("cannot open synthetic model file");
      model = nlohmann::json::parse(in).get<SyntheticCostModel>();
    } else if (extra.contains("synthetic_model")) {
      model = extra.at("synthetic_model").get<SyntheticCostModel>();
    }

    // Fault injection for exercising the profiler's failure path.
    if (extra.contains("abort_benchmarks")) {
      for (const auto& name : extra.at("abort_benchmarks")) {
        if (name.get<std::string>() == args.benchmark) std::abort();
      }
    }

    const auto registry = Registry::load_default();
    const auto manifest = synthetic_roi_manifest(registry, args.benchmark, args.repetitions, extra);

    RunnerInvocation inv;
    inv.executable = argv[0];
    inv.benchmark = args.benchmark;
    inv.phase = args.phase;
    inv.config_path = args.config_path;
    inv.config = file.config;
    inv.thread_count = thread_count_from_environment();
    inv.repetitions = args.repetitions;

    const auto report = synthetic_execute(inv, model, manifest);
    std::cout << format_self_report(report) << std::flush;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "synthetic runner: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace fheprof
