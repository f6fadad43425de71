// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/denoise.hpp"

#include "fheprof/errors.hpp"

namespace fheprof {

std::optional<double> DenoisedMetrics::setup_overhead() const {
  if (roi_time <= 0) return std::nullopt;
  return setup_time / roi_time;
}

DenoisedMetrics denoise(const MeasurementRecord& full, const MeasurementRecord& setup) {
  if (full.benchmark != setup.benchmark || full.config != setup.config ||
      full.thread_count != setup.thread_count) {
    throw ArgumentError("denoise needs records of one benchmark/config/thread count, got '" +
                        full.benchmark + "' and '" + setup.benchmark + "'");
  }
  DenoisedMetrics m;
  m.benchmark = full.benchmark;
  m.config = full.config;
  m.thread_count = full.thread_count;
  m.full_time = full.wall_time;
  m.setup_time = setup.wall_time;

  m.roi_time = full.wall_time - setup.wall_time;
  if (m.roi_time < 0) {
    m.warnings.push_back("negative ROI time (" + std::to_string(m.roi_time) +
                         " s) clamped to 0");
    m.roi_time = 0;
  }
  if (full.energy && setup.energy) {
    double e = *full.energy - *setup.energy;
    if (e < 0) {
      m.warnings.push_back("negative ROI energy (" + std::to_string(e) + " J) clamped to 0");
      e = 0;
    }
    m.roi_energy = e;
  } else if (full.energy || setup.energy) {
    m.warnings.emplace_back("energy recorded for only one phase; ROI energy absent");
  }
  for (const auto& [name, value] : full.event_counts) {
    const auto it = setup.event_counts.find(name);
    if (it == setup.event_counts.end()) {
      m.warnings.push_back("event '" + name + "' missing from setup phase; dropped");
      continue;
    }
    double delta = value - it->second;
    if (delta < 0) {
      m.warnings.push_back("negative ROI count for event '" + name + "' clamped to 0");
      delta = 0;
    }
    m.roi_events[name] = delta;
  }
  for (const auto& [name, value] : setup.event_counts) {
    if (!full.event_counts.contains(name)) {
      m.warnings.push_back("event '" + name + "' missing from full phase; dropped");
    }
  }
  return m;
}

DenoisedMetrics derive(DenoisedMetrics m) {
  m.avg_power.reset();
  m.ipc.reset();
  if (m.roi_energy) {
    if (m.roi_time > 0) {
      m.avg_power = *m.roi_energy / m.roi_time;
    } else {
      m.warnings.emplace_back("ROI time is zero; average power absent");
    }
  }
  const auto instructions = m.roi_events.find("instructions");
  const auto cycles = m.roi_events.find("cpu-cycles");
  if (instructions != m.roi_events.end() && cycles != m.roi_events.end()) {
    if (cycles->second > 0) {
      m.ipc = instructions->second / cycles->second;
    } else {
      m.warnings.emplace_back("cpu-cycles count is zero; IPC absent (degenerate counter)");
    }
  }
  return m;
}

DenoisedMetrics per_call(DenoisedMetrics m, std::int64_t calls) {
  if (calls < 1) throw ArgumentError("calls must be >= 1, got " + std::to_string(calls));
  const auto n = static_cast<double>(calls);
  m.calls = static_cast<std::uint64_t>(calls);
  m.per_call_time = m.roi_time / n;
  m.per_call_energy =
      m.roi_energy ? std::optional<double>(*m.roi_energy / n) : std::nullopt;
  m.per_call_events.clear();
  for (const auto& [name, value] : m.roi_events) m.per_call_events[name] = value / n;
  return m;
}

}  // namespace fheprof
