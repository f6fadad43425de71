// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fheprof/crypto_config.hpp"
#include "fheprof/energy.hpp"
#include "fheprof/events.hpp"
#include "fheprof/flamegraph.hpp"
#include "fheprof/process.hpp"
#include "fheprof/protocol.hpp"

namespace fheprof {

/// Which profiler pass produced a measurement.
enum class MeasurementPass { Runtime, Events, Stacks };

std::string to_string(MeasurementPass pass);
MeasurementPass parse_measurement_pass(std::string_view text);

struct MeasurementRecord {
  std::string benchmark;
  RunPhase phase = RunPhase::Full;
  MeasurementPass pass = MeasurementPass::Runtime;
  CryptoConfig config;
  int thread_count = 1;
  double wall_time = 0.0;
  /// Package-domain joules; absent when the energy interface is unavailable.
  std::optional<double> energy;
  /// Real-valued so that medians over an even number of runs stay exact.
  std::map<std::string, double> event_counts;
  /// -1 marks an aggregate.
  int run_index = 0;
  std::chrono::system_clock::time_point timestamp{};
  int exit_status = 0;
  /// Wall time summed over every child execution that fed this run (one per event group).
  double total_wall_time = 0.0;
  /// Calls the runner reported executing.
  std::uint64_t repetitions = 1;
};

struct RunFailure {
  int run_index = 0;
  std::size_t group_index = 0;
  int exit_status = 0;
  std::string reason;
};

struct MeasureResult {
  /// Admitted runs, ordered by run index.
  std::vector<MeasurementRecord> records;
  /// Self-report of the first execution of each admitted run.
  std::vector<SelfReport> reports;
  /// One entry per failed execution, retries included.
  std::vector<RunFailure> failures;
  std::size_t executions = 0;
  std::vector<std::string> warnings;
};

/// Wraps a child command line with a call-stack sampler and collects its dump.
class StackSampler {
 public:
  virtual ~StackSampler() = default;
  virtual std::vector<std::string> wrap(const std::vector<std::string>& argv,
                                        const std::filesystem::path& output) const = 0;
  /// Samples written to `output` by a wrapped run.
  virtual std::vector<StackSample> collect(const std::filesystem::path& output) const = 0;
};

/// `perf record -F <hz> -g` followed by `perf script`.
class PerfStackSampler final : public StackSampler {
 public:
  /// Throws CapabilityError when the perf tool cannot be run.
  static std::shared_ptr<PerfStackSampler> probe(std::string perf_executable = "perf",
                                                 int frequency_hz = kDefaultSampleFrequencyHz);

  std::vector<std::string> wrap(const std::vector<std::string>& argv,
                                const std::filesystem::path& output) const override;
  std::vector<StackSample> collect(const std::filesystem::path& output) const override;

 private:
  PerfStackSampler(std::string perf, int frequency_hz)
      : perf_(std::move(perf)), frequency_hz_(frequency_hz) {}

  std::string perf_;
  int frequency_hz_;
};

struct StackResult {
  MeasureResult measurement;
  /// Folded over every admitted run; absent when no samples were captured.
  std::optional<FoldedProfile> profile;
};

struct ProfilerOptions {
  /// Extra attempts for a failed execution before the run is excluded.
  int retry_budget = 1;
  bool discard_child_stderr = false;
};

/// Runs benchmark processes one at a time and measures them.
class Profiler {
 public:
  /// Either backend may be null: energy is then recorded as absent and
  /// event sets are refused.
  Profiler(std::shared_ptr<EnergyCounter> energy, std::shared_ptr<EventCounterBackend> events,
           ProfilerOptions options = {});

  /// Probes the host's RAPL and perf_event facilities.
  static Profiler for_host(ProfilerOptions options = {});

  /// Executes the invocation `runs` times per event group and merges groups by
  /// run index. Without events each run is a single execution.
  MeasureResult measure(const RunnerInvocation& invocation, const std::optional<EventSet>& events,
                        int runs) const;

  /// Runs the invocation `runs` times under the stack sampler, one
  /// dump per run written below `work_dir`.
  StackResult record_stacks(const RunnerInvocation& invocation, int runs,
                            const std::filesystem::path& work_dir) const;

  void set_stack_sampler(std::shared_ptr<StackSampler> sampler) { stacks_ = std::move(sampler); }

  bool energy_available() const { return energy_ != nullptr; }
  bool stacks_available() const { return stacks_ != nullptr; }
  bool events_available() const { return events_ != nullptr; }
  const ProfilerOptions& options() const { return options_; }

 private:
  struct Execution {
    bool ok = false;
    MeasurementRecord record;
    std::optional<SelfReport> report;
    std::string reason;
    std::vector<std::string> warnings;
  };

  Execution execute_once(const RunnerInvocation& invocation, const std::vector<std::string>& events,
                         MeasurementPass pass, int run_index,
                         const std::vector<std::string>& argv) const;
  /// execute_once with the retry budget applied; failures are appended.
  Execution execute_with_retries(const RunnerInvocation& invocation,
                                 const std::vector<std::string>& events, MeasurementPass pass,
                                 int run_index, std::size_t group_index,
                                 const std::vector<std::string>& argv, MeasureResult& result) const;

  std::shared_ptr<EnergyCounter> energy_;
  std::shared_ptr<EventCounterBackend> events_;
  std::shared_ptr<StackSampler> stacks_;
  ProfilerOptions options_;
};

double median(std::vector<double> values);

/// Field-wise median of homogeneous records; run_index of the result is -1.
MeasurementRecord aggregate_median(std::span<const MeasurementRecord> records);

}  // namespace fheprof
