// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

// Contract between the framework and benchmark executables. The full
// protocol is documented in docs/runner_protocol.md.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fheprof/crypto_config.hpp"
#include "fheprof/registry.hpp"

namespace fheprof {

/// Setup runs initialization only; Full runs initialization plus the ROI.
enum class RunPhase { Setup, Full };

std::string to_string(RunPhase phase);
RunPhase parse_run_phase(std::string_view text);

/// Environment variable carrying the thread budget to the runner.
inline constexpr std::string_view kThreadEnvVar = "OMP_NUM_THREADS";
inline constexpr std::string_view kSelfReportBegin = "===SELFREPORT-BEGIN===";
inline constexpr std::string_view kSelfReportEnd = "===SELFREPORT-END===";
/// Primitives repeat until their cumulative runtime reaches this.
inline constexpr double kMinCumulativeSeconds = 0.5;

struct RunnerInvocation {
  std::filesystem::path executable;
  std::string benchmark;
  RunPhase phase = RunPhase::Full;
  std::filesystem::path config_path;
  /// Mirrors the `crypto` section of the file at config_path.
  CryptoConfig config;
  int thread_count = 1;
  std::uint64_t repetitions = 1;

  /// `<exe> --benchmark <name> --phase setup|full --config <path> --reps <n>`
  std::vector<std::string> argv() const;
  std::vector<std::pair<std::string, std::string>> environment() const;
};

struct SelfReport {
  std::string benchmark;
  RunPhase phase = RunPhase::Full;
  std::uint64_t repetitions_executed = 0;
  std::optional<double> inner_roi_seconds;
  std::optional<std::map<std::string, std::uint64_t>> dynamic_counts;

  bool operator==(const SelfReport&) const = default;
};

/// Smallest r with r * per_call_estimate >= min_cumulative, at least 1.
std::uint64_t compute_repetitions(double per_call_estimate,
                                  double min_cumulative = kMinCumulativeSeconds);

RunnerInvocation build_invocation(const BenchmarkSpec& spec, const CryptoConfig& config,
                                  RunPhase phase, int threads, std::uint64_t repetitions,
                                  std::filesystem::path config_path);

/// Extracts the sentinel-framed document from a runner's standard output.
SelfReport parse_self_report(std::string_view raw);
/// Sentinel-framed payload, newline-terminated.
std::string format_self_report(const SelfReport& report);

/// Document written to RunnerInvocation::config_path.
struct RunnerConfigFile {
  std::string benchmark;
  CryptoConfig config;
  nlohmann::json extra_params = nlohmann::json::object();
  std::filesystem::path artifact_dir;
};

void write_runner_config(const std::filesystem::path& path, const RunnerConfigFile& file);
RunnerConfigFile read_runner_config(const std::filesystem::path& path);

/// Runner-side argv parsing; throws ArgumentError on malformed input.
struct RunnerArgs {
  std::string benchmark;
  RunPhase phase = RunPhase::Full;
  std::filesystem::path config_path;
  std::uint64_t repetitions = 1;
};

RunnerArgs parse_runner_args(int argc, const char* const* argv);
/// Thread count from kThreadEnvVar; 1 when unset.
int thread_count_from_environment();

}  // namespace fheprof
