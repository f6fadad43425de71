// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fheprof/crypto_config.hpp"
#include "fheprof/protocol.hpp"
#include "fheprof/registry.hpp"

namespace fheprof {

/// Closed-form cost model behind the synthetic runner. A run of the ROI takes
///
///   sum_p count_p * base_p * (N / 2^16)^ring_exponent * (L / 10)^depth_exponent
///     / min(threads, saturation_threads) * (1 + u),   u ~ U[-noise, +noise]
///
/// seconds; every phase additionally spins setup_seconds.
struct SyntheticCostModel {
  std::map<std::string, double> base_costs;
  double ring_exponent = 1.0;
  double depth_exponent = 1.0;
  int saturation_threads = 8;
  double noise_amplitude = 0.0;
  double setup_seconds = 0.02;
  /// Noise seed; drawn from the OS when unset.
  std::optional<std::uint64_t> seed;

  /// Modest costs for all fourteen catalog primitives.
  static SyntheticCostModel default_model();

  /// Throws ArgumentError when an invariant is violated.
  void validate() const;

  /// Multiplier applied to every base cost at this configuration.
  double scale(const CryptoConfig& config, int threads) const;
  /// Noise-free seconds for one call.
  double per_call_seconds(const std::string& primitive, const CryptoConfig& config,
                          int threads) const;
  /// Noise-free ROI seconds for a whole manifest.
  double modeled_roi_seconds(const OpCountManifest& manifest, const CryptoConfig& config,
                             int threads) const;
};

void to_json(nlohmann::json& j, const SyntheticCostModel& model);
void from_json(const nlohmann::json& j, SyntheticCostModel& model);

/// Spins the calling thread until `duration` has elapsed.
void busy_spin(std::chrono::duration<double> duration);

/// The operations the ROI performs: {benchmark: repetitions} for a primitive,
/// else extra_params["manifest"] when supplied, else the registry manifest.
OpCountManifest synthetic_roi_manifest(const Registry& registry, const std::string& benchmark,
                                       std::uint64_t repetitions,
                                       const nlohmann::json& extra_params);

/// Performs the modeled work in-process and returns the self-report.
SelfReport synthetic_execute(const RunnerInvocation& invocation, const SyntheticCostModel& model,
                             const OpCountManifest& roi_manifest);

/// Entry point shared by the synthetic runner executable.
int synthetic_runner_main(int argc, const char* const* argv);

}  // namespace fheprof
