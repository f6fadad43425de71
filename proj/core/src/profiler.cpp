// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/profiler.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fheprof/errors.hpp"

namespace fheprof {

std::string to_string(MeasurementPass pass) {
  switch (pass) {
    case MeasurementPass::Runtime: return "runtime";
    case MeasurementPass::Events: return "events";
    case MeasurementPass::Stacks: return "stacks";
  }
  return "runtime";
}

MeasurementPass parse_measurement_pass(std::string_view text) {
  if (text == "runtime") return MeasurementPass::Runtime;
  if (text == "events") return MeasurementPass::Events;
  if (text == "stacks") return MeasurementPass::Stacks;
  throw ArgumentError("unknown measurement pass '" + std::string(text) + "'");
}

std::shared_ptr<PerfStackSampler> PerfStackSampler::probe(std::string perf_executable,
                                                          int frequency_hz) {
  if (frequency_hz < 1) throw ArgumentError("sampling frequency must be >= 1 Hz");
  SpawnRequest request{{perf_executable, "--version"}, {}, true};
  ChildOutcome outcome;
  try {
    outcome = run_child(request);
  } catch (const Error& e) {
    throw CapabilityError(std::string("cannot run ") + perf_executable + ": " + e.what());
  }
  if (!outcome.success()) {
    throw CapabilityError("cannot run '" + perf_executable + "'" +
                          (outcome.exec_failed ? ": " + outcome.exec_error : std::string()));
  }
  return std::shared_ptr<PerfStackSampler>(
      new PerfStackSampler(std::move(perf_executable), frequency_hz));
}

std::vector<std::string> PerfStackSampler::wrap(const std::vector<std::string>& argv,
                                                const std::filesystem::path& output) const {
  std::vector<std::string> out{perf_, "record", "-q", "-F", std::to_string(frequency_hz_),
                               "-g", "-o", output.string(), "--"};
  out.insert(out.end(), argv.begin(), argv.end());
  return out;
}

std::vector<StackSample> PerfStackSampler::collect(const std::filesystem::path& output) const {
  SpawnRequest request{{perf_, "script", "-i", output.string()}, {}, true};
  const auto outcome = run_child(request);
  if (!outcome.success()) {
    throw CapabilityError("perf script failed on " + output.string() + " (exit " +
                          std::to_string(outcome.exit_status) + ")");
  }
  std::istringstream in(outcome.stdout_text);
  return parse_perf_script(in);
}

Profiler::Profiler(std::shared_ptr<EnergyCounter> energy,
                   std::shared_ptr<EventCounterBackend> events, ProfilerOptions options)
    : energy_(std::move(energy)), events_(std::move(events)), options_(options) {
  if (options_.retry_budget < 0) throw ArgumentError("retry budget must be >= 0");
}

Profiler Profiler::for_host(ProfilerOptions options) {
  std::shared_ptr<EnergyCounter> energy;
  std::shared_ptr<EventCounterBackend> events;
  try {
    energy = RaplEnergyCounter::open();
  } catch (const CapabilityError&) {
  }
  try {
    events = PerfEventBackend::probe();
  } catch (const CapabilityError&) {
  }
  Profiler profiler(std::move(energy), std::move(events), options);
  try {
    profiler.set_stack_sampler(PerfStackSampler::probe());
  } catch (const CapabilityError&) {
  }
  return profiler;
}

Profiler::Execution Profiler::execute_once(const RunnerInvocation& invocation,
                                           const std::vector<std::string>& events,
                                           MeasurementPass pass, int run_index,
                                           const std::vector<std::string>& argv) const {
  Execution exec;
  auto& rec = exec.record;
  rec.benchmark = invocation.benchmark;
  rec.phase = invocation.phase;
  rec.pass = pass;
  rec.config = invocation.config;
  rec.thread_count = invocation.thread_count;
  rec.run_index = run_index;
  rec.timestamp = std::chrono::system_clock::now();

  std::unique_ptr<CounterSession> session;
  std::optional<double> energy_before;
  std::optional<double> energy_after;
  auto read_energy = [&](std::optional<double>& slot) {
    if (!energy_) return;
    try {
      slot = energy_->read_joules();
    } catch (const CapabilityError& e) {
      exec.warnings.emplace_back(e.what());
    }
  };

  ChildHooks hooks;
  hooks.on_spawned = [&](int pid) {
    if (!events.empty()) session = events_->attach(pid, events);
  };
  hooks.on_release = [&] { read_energy(energy_before); };
  hooks.on_exit = [&] { read_energy(energy_after); };

  SpawnRequest request{argv, invocation.environment(), options_.discard_child_stderr};
  ChildOutcome outcome;
  try {
    outcome = run_child(request, hooks);
  } catch (const IoError& e) {
    exec.reason = e.what();
    return exec;
  }
  rec.wall_time = outcome.wall_seconds;
  rec.total_wall_time = outcome.wall_seconds;
  rec.exit_status = outcome.exit_status;
  if (energy_before && energy_after) {
    rec.energy = energy_delta(*energy_before, *energy_after, energy_->max_range_joules());
  }
  if (session) {
    for (const auto& [name, value] : session->read()) {
      if (value) rec.event_counts[name] = static_cast<double>(*value);
    }
    const auto w = session->warnings();
    exec.warnings.insert(exec.warnings.end(), w.begin(), w.end());
  }

  if (outcome.exec_failed) {
    exec.reason = "cannot execute '" + argv.front() + "': " + outcome.exec_error;
    return exec;
  }
  if (outcome.exit_status != 0) {
    exec.reason = outcome.term_signal != 0
                      ? "killed by signal " + std::to_string(outcome.term_signal)
                      : "exited with status " + std::to_string(outcome.exit_status);
    return exec;
  }
  SelfReport report;
  try {
    report = parse_self_report(outcome.stdout_text);
  } catch (const Error& e) {
    exec.reason = e.what();
    return exec;
  }
  if (report.benchmark != invocation.benchmark) {
    exec.reason = "self-report names benchmark '" + report.benchmark + "', expected '" +
                  invocation.benchmark + "'";
    return exec;
  }
  if (report.phase != invocation.phase) {
    exec.reason = "self-report phase '" + to_string(report.phase) + "' does not match '" +
                  to_string(invocation.phase) + "'";
    return exec;
  }
  if (report.repetitions_executed != invocation.repetitions) {
    exec.reason = "runner executed " + std::to_string(report.repetitions_executed) + " of " +
                  std::to_string(invocation.repetitions) + " requested repetitions";
    return exec;
  }
  if (report.inner_roi_seconds && *report.inner_roi_seconds < 0) {
    exec.reason = "negative inner_roi_seconds in self-report";
    return exec;
  }
  rec.repetitions = report.repetitions_executed;
  exec.report = std::move(report);
  exec.ok = true;
  return exec;
}

Profiler::Execution Profiler::execute_with_retries(const RunnerInvocation& invocation,
                                                   const std::vector<std::string>& events,
                                                   MeasurementPass pass, int run_index,
                                                   std::size_t group_index,
                                                   const std::vector<std::string>& argv,
                                                   MeasureResult& result) const {
  Execution exec;
  for (int attempt = 0; attempt <= options_.retry_budget; ++attempt) {
    exec = execute_once(invocation, events, pass, run_index, argv);
    ++result.executions;
    result.warnings.insert(result.warnings.end(), exec.warnings.begin(), exec.warnings.end());
    if (exec.ok) break;
    result.failures.push_back({run_index, group_index, exec.record.exit_status, exec.reason});
  }
  return exec;
}

MeasureResult Profiler::measure(const RunnerInvocation& invocation,
                                const std::optional<EventSet>& events, int runs) const {
  if (runs < 1) throw ArgumentError("runs must be >= 1");
  if (events && !events->groups.empty() && !events_) {
    throw CapabilityError("event counting requested but no counter backend is available");
  }
  const bool counting = events && !events->groups.empty();
  const std::vector<std::vector<std::string>> groups =
      counting ? events->groups : std::vector<std::vector<std::string>>{{}};
  const auto pass = counting ? MeasurementPass::Events : MeasurementPass::Runtime;
  const auto argv = invocation.argv();

  MeasureResult result;
  if (!energy_) result.warnings.emplace_back("energy interface unavailable; energy not recorded");
  for (int run = 0; run < runs; ++run) {
    std::optional<MeasurementRecord> merged;
    std::optional<SelfReport> first_report;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      auto exec = execute_with_retries(invocation, groups[g], pass, run, g, argv, result);
      if (!exec.ok) {
        merged.reset();
        break;
      }
      if (!merged) {
        merged = std::move(exec.record);
        first_report = std::move(exec.report);
      } else {
        for (const auto& [name, value] : exec.record.event_counts) merged->event_counts[name] = value;
        merged->total_wall_time += exec.record.total_wall_time;
      }
    }
    if (merged) {
      result.records.push_back(std::move(*merged));
      result.reports.push_back(std::move(*first_report));
    }
  }
  return result;
}

StackResult Profiler::record_stacks(const RunnerInvocation& invocation, int runs,
                                    const std::filesystem::path& work_dir) const {
  if (runs < 1) throw ArgumentError("runs must be >= 1");
  if (!stacks_) throw CapabilityError("no call-stack sampler is available");
  std::filesystem::create_directories(work_dir);
  StackResult out;
  FoldedProfileBuilder builder;
  for (int run = 0; run < runs; ++run) {
    const auto dump = work_dir / ("run" + std::to_string(run) + ".data");
    const auto argv = stacks_->wrap(invocation.argv(), dump);
    auto exec = execute_with_retries(invocation, {}, MeasurementPass::Stacks, run, 0, argv,
                                     out.measurement);
    if (!exec.ok) continue;
    try {
      for (const auto& sample : stacks_->collect(dump)) builder.add(sample);
    } catch (const Error& e) {
      out.measurement.warnings.emplace_back(e.what());
    }
    out.measurement.records.push_back(std::move(exec.record));
    out.measurement.reports.push_back(std::move(*exec.report));
  }
  if (!builder.empty()) {
    out.profile = builder.finish();
  } else {
    out.measurement.warnings.emplace_back("no call-stack samples captured for '" +
                                          invocation.benchmark + "'");
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("median of an empty list");
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + (upper - lower) / 2.0;
}

MeasurementRecord aggregate_median(std::span<const MeasurementRecord> records) {
  if (records.empty()) throw ArgumentError("no admitted records to aggregate");
  const auto& first = records.front();
  for (const auto& r : records) {
    if (r.benchmark != first.benchmark || r.phase != first.phase || r.config != first.config ||
        r.thread_count != first.thread_count) {
      throw ArgumentError("cannot aggregate heterogeneous records (" + first.benchmark + " vs " +
                          r.benchmark + ")");
    }
    if (r.exit_status != 0) throw ArgumentError("record with nonzero exit status in aggregate");
  }
  MeasurementRecord out = first;
  out.run_index = -1;
  std::vector<double> wall;
  std::vector<double> total;
  std::vector<double> energy;
  std::map<std::string, std::vector<double>> events;
  for (const auto& r : records) {
    wall.push_back(r.wall_time);
    total.push_back(r.total_wall_time);
    if (r.energy) energy.push_back(*r.energy);
    for (const auto& [name, value] : r.event_counts) events[name].push_back(value);
    out.timestamp = std::min(out.timestamp, r.timestamp);
  }
  out.wall_time = median(wall);
  out.total_wall_time = median(total);
  out.energy = energy.empty() ? std::nullopt : std::optional<double>(median(energy));
  out.event_counts.clear();
  for (auto& [name, values] : events) out.event_counts[name] = median(std::move(values));
  return out;
}

}  // namespace fheprof
