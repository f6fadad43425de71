// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/sweep.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <tuple>

#include "fheprof/errors.hpp"

namespace fheprof {

namespace {

template <typename T>
std::vector<std::optional<T>> axis(const std::optional<std::vector<T>>& values) {
  if (!values) return {std::nullopt};
  return {values->begin(), values->end()};
}

template <typename T>
void check_list(const std::optional<std::vector<T>>& values, const char* name) {
  if (values && values->empty()) throw ArgumentError(std::string(name) + " must not be empty");
}

template <typename T>
void read_optional_list(const nlohmann::json& j, const char* key,
                        std::optional<std::vector<T>>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<std::vector<T>>();
}

std::string describe_overrides(const ConfigOverrides& o) {
  std::string out;
  auto add = [&](const std::string& s) { out += (out.empty() ? "" : " ") + s; };
  if (o.log2_ring_dim) add("N=2^" + std::to_string(*o.log2_ring_dim));
  if (o.depth) add("L=" + std::to_string(*o.depth));
  if (o.batch_size) add("batch=" + std::to_string(*o.batch_size));
  if (o.security_standard) add("sec=" + to_string(*o.security_standard));
  return out.empty() ? "defaults" : out;
}

auto point_key(const PlanPoint& p) {
  return std::make_tuple(p.level, p.benchmark, p.config.log2_ring_dim, p.config.depth,
                         p.config.batch_size, p.config.security_standard, p.thread_count);
}

}  // namespace

void SweepSpec::validate() const {
  if (benchmarks.empty()) throw ArgumentError("sweep names no benchmarks");
  check_list(log2_ring_dims, "log2_ring_dims");
  check_list(depths, "depths");
  check_list(batch_sizes, "batch_sizes");
  check_list(security_standards, "security_standards");
  if (thread_counts.empty()) throw ArgumentError("thread_counts must not be empty");
  for (const int t : thread_counts) {
    if (t < 1) throw ArgumentError("thread counts must be positive, got " + std::to_string(t));
  }
  if (runs_per_point < 1) throw ArgumentError("runs_per_point must be >= 1");
  if (counter_budget < 1) throw ArgumentError("counter_budget must be >= 1");
  if (events) {
    if (events->empty()) throw ArgumentError("events must not be empty when given");
    for (const auto& e : *events) {
      if (!is_known_event(e)) throw ArgumentError("unknown performance event '" + e + "'");
    }
  }
  if (!extra_params.is_object()) throw ArgumentError("extra_params must be an object");
  for (const auto& [name, seconds] : per_call_estimates) {
    if (!(seconds > 0)) throw ArgumentError("per-call estimate for '" + name + "' must be > 0");
  }
}

std::optional<EventSet> SweepSpec::event_set() const {
  if (!events) return std::nullopt;
  return EventSet::from_names(*events, counter_budget);
}

void to_json(nlohmann::json& j, const SweepSpec& s) {
  j = nlohmann::json::object();
  j["benchmarks"] = s.benchmarks;
  j["log2_ring_dims"] = s.log2_ring_dims ? nlohmann::json(*s.log2_ring_dims) : nlohmann::json();
  j["depths"] = s.depths ? nlohmann::json(*s.depths) : nlohmann::json();
  j["batch_sizes"] = s.batch_sizes ? nlohmann::json(*s.batch_sizes) : nlohmann::json();
  if (s.security_standards) {
    auto arr = nlohmann::json::array();
    for (const auto std : *s.security_standards) arr.push_back(to_string(std));
    j["security_standards"] = arr;
  } else {
    j["security_standards"] = nullptr;
  }
  j["thread_counts"] = s.thread_counts;
  j["runs_per_point"] = s.runs_per_point;
  j["events"] = s.events ? nlohmann::json(*s.events) : nlohmann::json();
  j["counter_budget"] = s.counter_budget;
  j["record_stacks"] = s.record_stacks;
  j["extra_params"] = s.extra_params;
  j["runner_override"] = s.runner_override ? nlohmann::json(*s.runner_override) : nlohmann::json();
  j["per_call_estimates"] = s.per_call_estimates;
}

void from_json(const nlohmann::json& j, SweepSpec& s) {
  try {
    s = SweepSpec{};
    s.benchmarks = j.at("benchmarks").get<std::vector<std::string>>();
    read_optional_list(j, "log2_ring_dims", s.log2_ring_dims);
    read_optional_list(j, "depths", s.depths);
    read_optional_list(j, "batch_sizes", s.batch_sizes);
    if (j.contains("security_standards") && !j.at("security_standards").is_null()) {
      std::vector<SecurityStandard> stds;
      for (const auto& v : j.at("security_standards")) {
        stds.push_back(parse_security_standard(v.get<std::string>()));
      }
      s.security_standards = stds;
    }
    if (j.contains("thread_counts")) s.thread_counts = j.at("thread_counts").get<std::vector<int>>();
    s.runs_per_point = j.value("runs_per_point", kDefaultRunsPerPoint);
    read_optional_list(j, "events", s.events);
    s.counter_budget = j.value("counter_budget", kDefaultCounterBudget);
    s.record_stacks = j.value("record_stacks", false);
    if (j.contains("extra_params")) s.extra_params = j.at("extra_params");
    if (j.contains("runner_override") && !j.at("runner_override").is_null()) {
      s.runner_override = j.at("runner_override").get<std::string>();
    }
    if (j.contains("per_call_estimates")) {
      s.per_call_estimates = j.at("per_call_estimates").get<std::map<std::string, double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("sweep spec: ") + e.what());
  }
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read sweep spec " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
  return j.get<SweepSpec>();
}

std::size_t RunPlan::event_groups() const {
  const auto set = spec.event_set();
  return set ? set->group_count() : 0;
}

std::uint64_t RunPlan::expected_executions() const {
  const auto per_phase = static_cast<std::uint64_t>(spec.runs_per_point) *
                         (1 + event_groups() + (spec.record_stacks ? 1 : 0));
  return static_cast<std::uint64_t>(points.size()) * per_phase * 2;
}

RunPlan generate_sweep(const SweepSpec& spec, const Registry& registry) {
  spec.validate();
  RunPlan plan;
  plan.spec = spec;
  std::set<std::tuple<std::string, CryptoConfig, int>> seen;
  for (const auto& name : spec.benchmarks) {
    const auto& bench = registry.get(name);
    for (const auto& n : axis(spec.log2_ring_dims)) {
      for (const auto& l : axis(spec.depths)) {
        for (const auto& b : axis(spec.batch_sizes)) {
          for (const auto& sec : axis(spec.security_standards)) {
            ConfigOverrides o;
            o.log2_ring_dim = n;
            o.depth = l;
            o.batch_size = b;
            o.security_standard = sec;
            ResolvedConfig resolved;
            try {
              resolved = registry.resolve_config(bench, o);
            } catch (const InvalidConfigError& e) {
              for (const int t : spec.thread_counts) {
                plan.dropped.push_back({name, describe_overrides(o) + " threads=" +
                                                  std::to_string(t), e.what()});
              }
              continue;
            }
            for (const int t : spec.thread_counts) {
              if (!seen.emplace(name, resolved.config, t).second) continue;
              plan.points.push_back({name, bench.level, resolved.config, t, resolved.warnings});
            }
          }
        }
      }
    }
  }
  std::stable_sort(plan.points.begin(), plan.points.end(),
                   [](const PlanPoint& a, const PlanPoint& b) { return point_key(a) < point_key(b); });
  if (plan.points.empty()) {
    throw EmptyPlanError("every combination was invalid (" + std::to_string(plan.dropped.size()) +
                         " dropped)");
  }
  return plan;
}

std::string serialize_plan(const RunPlan& plan) {
  nlohmann::json j;
  j["spec"] = plan.spec;
  auto points = nlohmann::json::array();
  for (const auto& p : plan.points) {
    points.push_back({{"benchmark", p.benchmark},
                      {"level", to_string(p.level)},
                      {"config", p.config},
                      {"config_hash", config_hash(p.config)},
                      {"threads", p.thread_count},
                      {"phases", {"setup", "full"}},
                      {"warnings", p.warnings}});
  }
  j["points"] = points;
  auto dropped = nlohmann::json::array();
  for (const auto& d : plan.dropped) {
    dropped.push_back({{"benchmark", d.benchmark}, {"requested", d.requested}, {"reason", d.reason}});
  }
  j["dropped"] = dropped;
  j["expected_executions"] = plan.expected_executions();
  return j.dump(2) + "\n";
}

}  // namespace fheprof
