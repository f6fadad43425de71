// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fheprof {

/// Hardware counters assumed simultaneously schedulable without multiplexing.
inline constexpr std::size_t kDefaultCounterBudget = 4;

/// The default catalog in display order, using perf's generic spellings.
const std::vector<std::string>& default_event_names();

/// "core", "cache", "tlb", "page-faults"; throws ArgumentError for unknown names.
std::string event_category(std::string_view event);
bool is_known_event(std::string_view event);

/// Events plus a partition into groups that are measured in separate passes.
struct EventSet {
  std::vector<std::string> events;
  std::vector<std::vector<std::string>> groups;

  /// Groups never mix categories and hold at most `counter_budget` events.
  static EventSet from_names(std::vector<std::string> names,
                             std::size_t counter_budget = kDefaultCounterBudget);
  static EventSet default_catalog(std::size_t counter_budget = kDefaultCounterBudget);

  std::size_t group_count() const { return groups.size(); }
};

/// Counters attached to one child process.
class CounterSession {
 public:
  virtual ~CounterSession() = default;
  /// Totals over the child's lifetime; nullopt for events the host cannot count.
  virtual std::map<std::string, std::optional<std::uint64_t>> read() = 0;
  virtual std::vector<std::string> warnings() const { return {}; }
};

class EventCounterBackend {
 public:
  virtual ~EventCounterBackend() = default;
  /// Called after fork and before the child execs; counting starts at exec.
  virtual std::unique_ptr<CounterSession> attach(int pid,
                                                 const std::vector<std::string>& events) = 0;
};

/// Linux perf_event_open backend (user-space counts, inherited by threads).
class PerfEventBackend final : public EventCounterBackend {
 public:
  /// Throws CapabilityError when the syscall is unusable for every event.
  static std::shared_ptr<PerfEventBackend> probe();

  std::unique_ptr<CounterSession> attach(int pid, const std::vector<std::string>& events) override;
};

}  // namespace fheprof
