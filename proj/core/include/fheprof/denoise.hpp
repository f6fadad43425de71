// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fheprof/crypto_config.hpp"
#include "fheprof/profiler.hpp"

namespace fheprof {

/// Region-of-interest metrics: Full minus Setup.
struct DenoisedMetrics {
  std::string benchmark;
  CryptoConfig config;
  int thread_count = 1;
  double roi_time = 0.0;
  std::optional<double> roi_energy;
  std::optional<double> avg_power;
  std::optional<double> ipc;
  std::map<std::string, double> roi_events;
  std::optional<double> per_call_time;
  std::optional<double> per_call_energy;
  std::map<std::string, double> per_call_events;
  std::uint64_t calls = 1;
  /// Aggregated wall times of the two phases.
  double full_time = 0.0;
  double setup_time = 0.0;
  std::vector<std::string> warnings;

  /// Setup time relative to the ROI; absent when the ROI is zero.
  std::optional<double> setup_overhead() const;
};

/// Subtracts setup from full for time, energy and every shared event.
/// Throws ArgumentError when the records describe different runs.
DenoisedMetrics denoise(const MeasurementRecord& full, const MeasurementRecord& setup);

/// Fills avg_power and ipc.
DenoisedMetrics derive(DenoisedMetrics metrics);

/// Divides ROI totals by `calls`; throws ArgumentError when calls < 1.
DenoisedMetrics per_call(DenoisedMetrics metrics, std::int64_t calls);

}  // namespace fheprof
