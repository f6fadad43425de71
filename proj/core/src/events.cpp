// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/events.hpp"

#include <linux/perf_event.h>
#include <sys/syscall.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>

#include "fheprof/errors.hpp"

namespace fheprof {

namespace {

struct EventDef {
  std::string_view name;
  std::string_view category;
  std::uint32_t type;
  std::uint64_t config;
};

constexpr std::uint64_t cache_config(std::uint64_t cache, std::uint64_t op, std::uint64_t result) {
  return cache | (op << 8) | (result << 16);
}

constexpr std::array kEvents = {
    EventDef{"instructions", "core", PERF_TYPE_HARDWARE, PERF_COUNT_HW_INSTRUCTIONS},
    EventDef{"cpu-cycles", "core", PERF_TYPE_HARDWARE, PERF_COUNT_HW_CPU_CYCLES},
    EventDef{"branches", "core", PERF_TYPE_HARDWARE, PERF_COUNT_HW_BRANCH_INSTRUCTIONS},
    EventDef{"branch-misses", "core", PERF_TYPE_HARDWARE, PERF_COUNT_HW_BRANCH_MISSES},
    EventDef{"cache-references", "cache", PERF_TYPE_HARDWARE, PERF_COUNT_HW_CACHE_REFERENCES},
    EventDef{"cache-misses", "cache", PERF_TYPE_HARDWARE, PERF_COUNT_HW_CACHE_MISSES},
    EventDef{"L1-dcache-loads", "cache", PERF_TYPE_HW_CACHE,
             cache_config(PERF_COUNT_HW_CACHE_L1D, PERF_COUNT_HW_CACHE_OP_READ,
                          PERF_COUNT_HW_CACHE_RESULT_ACCESS)},
    EventDef{"L1-icache-load-misses", "cache", PERF_TYPE_HW_CACHE,
             cache_config(PERF_COUNT_HW_CACHE_L1I, PERF_COUNT_HW_CACHE_OP_READ,
                          PERF_COUNT_HW_CACHE_RESULT_MISS)},
    EventDef{"dTLB-loads", "tlb", PERF_TYPE_HW_CACHE,
             cache_config(PERF_COUNT_HW_CACHE_DTLB, PERF_COUNT_HW_CACHE_OP_READ,
                          PERF_COUNT_HW_CACHE_RESULT_ACCESS)},
    EventDef{"dTLB-load-misses", "tlb", PERF_TYPE_HW_CACHE,
             cache_config(PERF_COUNT_HW_CACHE_DTLB, PERF_COUNT_HW_CACHE_OP_READ,
                          PERF_COUNT_HW_CACHE_RESULT_MISS)},
    EventDef{"iTLB-load-misses", "tlb", PERF_TYPE_HW_CACHE,
             cache_config(PERF_COUNT_HW_CACHE_ITLB, PERF_COUNT_HW_CACHE_OP_READ,
                          PERF_COUNT_HW_CACHE_RESULT_MISS)},
    EventDef{"page-faults", "page-faults", PERF_TYPE_SOFTWARE, PERF_COUNT_SW_PAGE_FAULTS},
    EventDef{"minor-faults", "page-faults", PERF_TYPE_SOFTWARE, PERF_COUNT_SW_PAGE_FAULTS_MIN},
};

const EventDef* find_event(std::string_view name) {
  for (const auto& e : kEvents) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

long perf_event_open(perf_event_attr* attr, pid_t pid, int cpu, int group_fd, unsigned long flags) {
  return syscall(SYS_perf_event_open, attr, pid, cpu, group_fd, flags);
}

perf_event_attr make_attr(const EventDef& def) {
  perf_event_attr attr{};
  attr.size = sizeof(attr);
  attr.type = def.type;
  attr.config = def.config;
  attr.disabled = 1;
  attr.enable_on_exec = 1;
  attr.inherit = 1;
  attr.exclude_kernel = 1;
  attr.exclude_hv = 1;
  attr.read_format = PERF_FORMAT_TOTAL_TIME_ENABLED | PERF_FORMAT_TOTAL_TIME_RUNNING;
  return attr;
}

class PerfCounterSession final : public CounterSession {
 public:
  ~PerfCounterSession() override {
    for (const auto& c : counters_) {
      if (c.fd >= 0) ::close(c.fd);
    }
  }

  void add(std::string name, int fd, std::string failure) {
    counters_.push_back({std::move(name), fd, std::move(failure)});
  }

  std::map<std::string, std::optional<std::uint64_t>> read() override {
    std::map<std::string, std::optional<std::uint64_t>> out;
    for (const auto& c : counters_) {
      if (c.fd < 0) {
        out[c.name] = std::nullopt;
        continue;
      }
      std::array<std::uint64_t, 3> buf{};  // value, time_enabled, time_running
      const auto n = ::read(c.fd, buf.data(), sizeof(buf));
      if (n != static_cast<ssize_t>(sizeof(buf))) {
        out[c.name] = std::nullopt;
        warnings_.push_back("read of event '" + c.name + "' failed");
        continue;
      }
      if (buf[2] < buf[1]) {
        warnings_.push_back("event '" + c.name + "' was multiplexed (ran " +
                            std::to_string(buf[2]) + " of " + std::to_string(buf[1]) +
                            " ns); count left unscaled");
      }
      out[c.name] = buf[0];
    }
    return out;
  }

  std::vector<std::string> warnings() const override {
    auto all = warnings_;
    for (const auto& c : counters_) {
      if (c.fd < 0) all.push_back("event '" + c.name + "' unavailable: " + c.failure);
    }
    return all;
  }

 private:
  struct Counter {
    std::string name;
    int fd;
    std::string failure;
  };
  std::vector<Counter> counters_;
  std::vector<std::string> warnings_;
};

}  // namespace

const std::vector<std::string>& default_event_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : kEvents) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

std::string event_category(std::string_view event) {
  const auto* def = find_event(event);
  if (def == nullptr) throw ArgumentError("unknown performance event '" + std::string(event) + "'");
  return std::string(def->category);
}

bool is_known_event(std::string_view event) { return find_event(event) != nullptr; }

EventSet EventSet::from_names(std::vector<std::string> names, std::size_t counter_budget) {
  if (counter_budget < 1) throw ArgumentError("counter budget must be >= 1");
  EventSet set;
  std::vector<std::string> categories;
  std::map<std::string, std::vector<std::string>> by_category;
  for (auto& name : names) {
    if (std::find(set.events.begin(), set.events.end(), name) != set.events.end()) continue;
    const auto category = event_category(name);
    if (!by_category.contains(category)) categories.push_back(category);
    by_category[category].push_back(name);
    set.events.push_back(std::move(name));
  }
  for (const auto& category : categories) {
    const auto& members = by_category[category];
    for (std::size_t i = 0; i < members.size(); i += counter_budget) {
      const auto end = std::min(members.size(), i + counter_budget);
      set.groups.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(i),
                              members.begin() + static_cast<std::ptrdiff_t>(end));
    }
  }
  return set;
}

EventSet EventSet::default_catalog(std::size_t counter_budget) {
  return from_names(default_event_names(), counter_budget);
}

std::shared_ptr<PerfEventBackend> PerfEventBackend::probe() {
  // Counting our own task is enough to learn whether the syscall works at all.
  for (const auto& def : kEvents) {
    auto attr = make_attr(def);
    attr.enable_on_exec = 0;
    attr.inherit = 0;
    const auto fd = perf_event_open(&attr, 0, -1, -1, PERF_FLAG_FD_CLOEXEC);
    if (fd >= 0) {
      ::close(static_cast<int>(fd));
      return std::make_shared<PerfEventBackend>();
    }
  }
  throw CapabilityError(std::string("perf_event_open unusable: ") + std::strerror(errno));
}

std::unique_ptr<CounterSession> PerfEventBackend::attach(int pid,
                                                         const std::vector<std::string>& events) {
  auto session = std::make_unique<PerfCounterSession>();
  int leader = -1;
  for (const auto& name : events) {
    const auto* def = find_event(name);
    if (def == nullptr) throw ArgumentError("unknown performance event '" + name + "'");
    auto attr = make_attr(*def);
    auto fd = perf_event_open(&attr, pid, -1, leader, PERF_FLAG_FD_CLOEXEC);
    if (fd < 0 && leader >= 0) {
      // Not co-schedulable with the leader (e.g. unsupported on this PMU); count it alone.
      fd = perf_event_open(&attr, pid, -1, -1, PERF_FLAG_FD_CLOEXEC);
    }
    if (fd < 0) {
      session->add(name, -1, std::strerror(errno));
      continue;
    }
    if (leader < 0 && def->type != PERF_TYPE_SOFTWARE) leader = static_cast<int>(fd);
    session->add(name, static_cast<int>(fd), {});
  }
  return session;
}

}  // namespace fheprof
