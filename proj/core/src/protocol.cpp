// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/protocol.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "fheprof/errors.hpp"

namespace fheprof {

namespace {

// Offset of `sentinel` when it occupies a whole line at or after `from`.
std::size_t find_line(std::string_view text, std::string_view sentinel, std::size_t from) {
  auto pos = text.find(sentinel, from);
  while (pos != std::string_view::npos) {
    const bool line_start = pos == 0 || text[pos - 1] == '\n';
    const auto after = pos + sentinel.size();
    const bool line_end = after == text.size() || text[after] == '\n' ||
                          (text[after] == '\r' && (after + 1 == text.size() || text[after + 1] == '\n'));
    if (line_start && line_end) return pos;
    pos = text.find(sentinel, pos + 1);
  }
  return std::string_view::npos;
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ArgumentError(std::string(what) + " must be a non-negative integer, got '" +
                        std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string to_string(RunPhase phase) { return phase == RunPhase::Setup ? "setup" : "full"; }

RunPhase parse_run_phase(std::string_view text) {
  if (text == "setup") return RunPhase::Setup;
  if (text == "full") return RunPhase::Full;
  throw ArgumentError("phase must be 'setup' or 'full', got '" + std::string(text) + "'");
}

std::vector<std::string> RunnerInvocation::argv() const {
  return {executable.string(), "--benchmark", benchmark,         "--phase",
          to_string(phase),    "--config",    config_path.string(), "--reps",
          std::to_string(repetitions)};
}

std::vector<std::pair<std::string, std::string>> RunnerInvocation::environment() const {
  return {{std::string(kThreadEnvVar), std::to_string(thread_count)}};
}

std::uint64_t compute_repetitions(double per_call_estimate, double min_cumulative) {
  if (!(per_call_estimate > 0.0) || !std::isfinite(per_call_estimate)) {
    throw ArgumentError("per-call estimate must be a positive number of seconds");
  }
  if (per_call_estimate >= min_cumulative) return 1;
  auto reps = static_cast<std::uint64_t>(std::ceil(min_cumulative / per_call_estimate));
  // Correct the quotient's rounding against the product the contract is stated in.
  while (reps > 1 && static_cast<double>(reps - 1) * per_call_estimate >= min_cumulative) --reps;
  while (static_cast<double>(reps) * per_call_estimate < min_cumulative) ++reps;
  return std::max<std::uint64_t>(reps, 1);
}

RunnerInvocation build_invocation(const BenchmarkSpec& spec, const CryptoConfig& config,
                                  RunPhase phase, int threads, std::uint64_t repetitions,
                                  std::filesystem::path config_path) {
  if (threads < 1) throw ArgumentError("thread count must be >= 1, got " + std::to_string(threads));
  if (repetitions < 1) throw ArgumentError("repetitions must be >= 1");
  if (repetitions > 1 && spec.level != AbstractionLevel::Primitive) {
    throw ArgumentError("repetitions > 1 are only meaningful for primitives ('" + spec.name +
                        "' is a " + to_string(spec.level) + ")");
  }
  if (spec.runner.empty()) throw ArgumentError("benchmark '" + spec.name + "' has no runner");
  if (const auto violations = validate_config(config); !violations.empty()) {
    throw InvalidConfigError(describe(violations.front()));
  }
  RunnerInvocation inv;
  inv.executable = spec.runner;
  inv.benchmark = spec.name;
  inv.phase = phase;
  inv.config_path = std::move(config_path);
  inv.config = config;
  inv.thread_count = threads;
  inv.repetitions = repetitions;
  return inv;
}

SelfReport parse_self_report(std::string_view raw) {
  const auto begin = find_line(raw, kSelfReportBegin, 0);
  if (begin == std::string_view::npos) {
    throw ParseError("missing " + std::string(kSelfReportBegin) + " line", raw.size());
  }
  auto doc_start = raw.find('\n', begin);
  doc_start = doc_start == std::string_view::npos ? raw.size() : doc_start + 1;
  const auto end = find_line(raw, kSelfReportEnd, doc_start);
  if (end == std::string_view::npos) {
    throw ParseError("missing " + std::string(kSelfReportEnd) + " line", raw.size());
  }

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(raw.substr(doc_start, end - doc_start));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), doc_start + (e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!doc.is_object()) throw SchemaError("self-report must be an object");

  const auto require = [&](const char* key) -> const nlohmann::json& {
    if (!doc.contains(key)) throw SchemaError(std::string("self-report lacks '") + key + "'");
    return doc.at(key);
  };

  SelfReport report;
  try {
    report.benchmark = require("benchmark").get<std::string>();
    if (report.benchmark.empty()) throw SchemaError("self-report 'benchmark' is empty");
    report.phase = parse_run_phase(require("phase").get<std::string>());
    const auto& reps = require("repetitions_executed");
    if (!reps.is_number_unsigned()) {
      throw SchemaError("'repetitions_executed' must be a non-negative integer");
    }
    report.repetitions_executed = reps.get<std::uint64_t>();
    if (doc.contains("inner_roi_seconds") && !doc.at("inner_roi_seconds").is_null()) {
      const auto seconds = doc.at("inner_roi_seconds").get<double>();
      if (!(seconds >= 0.0)) throw SchemaError("'inner_roi_seconds' must be >= 0");
      report.inner_roi_seconds = seconds;
    }
    if (doc.contains("dynamic_counts") && !doc.at("dynamic_counts").is_null()) {
      std::map<std::string, std::uint64_t> counts;
      for (const auto& [name, value] : doc.at("dynamic_counts").items()) {
        if (!value.is_number_unsigned()) {
          throw SchemaError("dynamic count for '" + name + "' must be a non-negative integer");
        }
        counts[name] = value.get<std::uint64_t>();
      }
      report.dynamic_counts = std::move(counts);
    }
  } catch (const nlohmann::json::type_error& e) {
    throw SchemaError(e.what());
  } catch (const ArgumentError& e) {
    throw SchemaError(e.what());
  }
  return report;
}

std::string format_self_report(const SelfReport& report) {
  nlohmann::json doc{{"benchmark", report.benchmark},
                     {"phase", to_string(report.phase)},
                     {"repetitions_executed", report.repetitions_executed}};
  if (report.inner_roi_seconds) doc["inner_roi_seconds"] = *report.inner_roi_seconds;
  if (report.dynamic_counts) doc["dynamic_counts"] = *report.dynamic_counts;
  std::string out;
  out += kSelfReportBegin;
  out += '\n';
  out += doc.dump();
  out += '\n';
  out += kSelfReportEnd;
  out += '\n';
  return out;
}

void write_runner_config(const std::filesystem::path& path, const RunnerConfigFile& file) {
  const nlohmann::json doc{{"benchmark", file.benchmark},
                           {"crypto", file.config},
                           {"extra_params", file.extra_params},
                           {"artifact_dir", file.artifact_dir.string()}};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write runner config " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("short write to " + path.string());
}

RunnerConfigFile read_runner_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open runner config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
  RunnerConfigFile file;
  try {
    file.benchmark = doc.value("benchmark", std::string{});
    file.config = doc.at("crypto").get<CryptoConfig>();
    file.extra_params = doc.value("extra_params", nlohmann::json::object());
    file.artifact_dir = doc.value("artifact_dir", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return file;
}

RunnerArgs parse_runner_args(int argc, const char* const* argv) {
  RunnerArgs args;
  bool have_benchmark = false;
  bool have_phase = false;
  bool have_config = false;
  for (int i = 1; i < argc; ++i) {
    const std::string_view flag = argv[i];
    if (i + 1 >= argc) throw ArgumentError("flag " + std::string(flag) + " needs a value");
    const std::string_view value = argv[++i];
    if (flag == "--benchmark") {
      args.benchmark = value;
      have_benchmark = true;
    } else if (flag == "--phase") {
      args.phase = parse_run_phase(value);
      have_phase = true;
    } else if (flag == "--config") {
      args.config_path = std::string(value);
      have_config = true;
    } else if (flag == "--reps") {
      args.repetitions = parse_u64(value, "--reps");
      if (args.repetitions < 1) throw ArgumentError("--reps must be >= 1");
    } else {
      throw ArgumentError("unknown flag " + std::string(flag));
    }
  }
  if (!have_benchmark || !have_phase || !have_config) {
    throw ArgumentError("usage: <exe> --benchmark <name> --phase setup|full --config <path> --reps <n>");
  }
  return args;
}

int thread_count_from_environment() {
  const char* value = std::getenv(std::string(kThreadEnvVar).c_str());
  if (value == nullptr || *value == '\0') return 1;
  const auto n = parse_u64(value, kThreadEnvVar);
  if (n < 1) throw ArgumentError(std::string(kThreadEnvVar) + " must be >= 1");
  return static_cast<int>(n);
}

}  // namespace fheprof
