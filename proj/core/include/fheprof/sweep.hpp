// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fheprof/crypto_config.hpp"
#include "fheprof/events.hpp"
#include "fheprof/registry.hpp"

namespace fheprof {

/// Runs per point when the spec does not say.
inline constexpr int kDefaultRunsPerPoint = 5;

/// Combinatorial sweep. An absent parameter list means "each benchmark's default".
struct SweepSpec {
  std::vector<std::string> benchmarks;
  std::optional<std::vector<int>> log2_ring_dims;
  std::optional<std::vector<int>> depths;
  std::optional<std::vector<std::uint64_t>> batch_sizes;
  std::optional<std::vector<SecurityStandard>> security_standards;
  std::vector<int> thread_counts{1};
  int runs_per_point = kDefaultRunsPerPoint;
  /// Event names to count; absent disables the events pass.
  std::optional<std::vector<std::string>> events;
  std::size_t counter_budget = kDefaultCounterBudget;
  bool record_stacks = false;
  /// Merged over every benchmark's extra_params.
  nlohmann::json extra_params = nlohmann::json::object();
  /// Replaces every benchmark's runner executable.
  std::optional<std::string> runner_override;
  /// Per-call seconds used to size primitive repetitions instead of a calibration run.
  std::map<std::string, double> per_call_estimates;

  /// Throws ArgumentError when an invariant is violated.
  void validate() const;
  std::optional<EventSet> event_set() const;
};

void to_json(nlohmann::json& j, const SweepSpec& spec);
void from_json(const nlohmann::json& j, SweepSpec& spec);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

struct PlanPoint {
  std::string benchmark;
  AbstractionLevel level = AbstractionLevel::Primitive;
  CryptoConfig config;
  int thread_count = 1;
  std::vector<std::string> warnings;
};

struct DroppedPoint {
  std::string benchmark;
  std::string requested;
  std::string reason;
};

/// Ordered points; each expands to Setup then Full, for every enabled pass.
struct RunPlan {
  SweepSpec spec;
  std::vector<PlanPoint> points;
  std::vector<DroppedPoint> dropped;

  /// Event groups measured per phase (0 without events).
  std::size_t event_groups() const;
  /// runs * (1 + event groups + stack pass) * 2 phases, per point.
  std::uint64_t expected_executions() const;
};

/// Cartesian product of the spec's lists, resolved against the registry.
/// Invalid combinations are dropped with a reason and duplicates collapse.
/// Throws EmptyPlanError when nothing survives.
RunPlan generate_sweep(const SweepSpec& spec, const Registry& registry);

/// Canonical serialization; identical inputs give identical text.
std::string serialize_plan(const RunPlan& plan);

}  // namespace fheprof
