// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fheprof/denoise.hpp"
#include "fheprof/profiler.hpp"
#include "fheprof/registry.hpp"
#include "fheprof/results_store.hpp"
#include "fheprof/sweep.hpp"

namespace fheprof {

enum class PointStatus { Executed, Cached, Failed };

std::string to_string(PointStatus status);

struct PointOutcome {
  PlanPoint point;
  PointStatus status = PointStatus::Executed;
  std::string reason;
  std::uint64_t executions = 0;
  std::optional<DenoisedMetrics> metrics;
  std::optional<std::filesystem::path> folded_stacks;
};

struct ExecutionSummary {
  std::size_t points_executed = 0;
  std::size_t points_cached = 0;
  std::size_t points_failed = 0;
  /// Child executions of the measurement passes, retries included.
  std::uint64_t measurement_executions = 0;
  /// Single-call runs sizing primitive repetitions; not part of the passes.
  std::uint64_t calibration_executions = 0;
  std::size_t artifacts_created = 0;
  std::size_t artifacts_reused = 0;
  std::vector<PointOutcome> points;

  bool all_cached() const { return points_cached == points.size(); }
  std::uint64_t total_executions() const { return measurement_executions + calibration_executions; }
  std::string describe() const;
};

struct ExecutionOptions {
  /// Called after each point finishes.
  std::function<void(const PointOutcome&)> on_point;
};

/// Stable identifier of a point, used for run and stack file names.
std::string point_id(const PlanPoint& point);

/// Measures every point not yet denoised in `store`. Per-point failures are
/// recorded and skipped; store write failures propagate.
ExecutionSummary execute_plan(const RunPlan& plan, const Registry& registry,
                              const Profiler& profiler, ResultsStore& store,
                              const ExecutionOptions& options = {});

}  // namespace fheprof
