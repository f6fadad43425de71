// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/executor.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <tuple>

#include "fheprof/errors.hpp"

namespace fheprof {

namespace {

std::string slug(std::string_view name) {
  std::string out;
  for (const unsigned char c : name) {
    if (std::isalnum(c)) {
      out += static_cast<char>(std::tolower(c));
    } else if (!out.empty() && out.back() != '-') {
      out += '-';
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "benchmark" : out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void append_unique(std::vector<std::string>& into, const std::vector<std::string>& from) {
  for (const auto& w : from) {
    if (std::find(into.begin(), into.end(), w) == into.end()) into.push_back(w);
  }
}

// Raised inside a point to abandon it; the plan continues.
struct PointFailure {
  std::string reason;
};

class PointRunner {
 public:
  PointRunner(const RunPlan& plan, const Registry& registry, const Profiler& profiler,
              ResultsStore& store, ExecutionSummary& summary)
      : plan_(plan), registry_(registry), profiler_(profiler), store_(store), summary_(summary) {}

  PointOutcome run(const PlanPoint& point) {
    PointOutcome outcome;
    outcome.point = point;
    rows_.clear();
    warnings_ = point.warnings;
    executions_ = 0;
    try {
      outcome.metrics = measure_point(point, outcome);
      outcome.status = PointStatus::Executed;
    } catch (const PointFailure& f) {
      outcome.status = PointStatus::Failed;
      outcome.reason = f.reason;
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      outcome.status = PointStatus::Failed;
      outcome.reason = e.what();
    }
    outcome.executions = executions_;
    if (outcome.status == PointStatus::Failed && rows_.empty()) {
      ResultRow row;
      row.kind = RowKind::Failure;
      row.set("benchmark", point.benchmark);
      put_config(row, point.config, point.thread_count);
      row.set("reason", outcome.reason);
      rows_.push_back(std::move(row));
    }
    store_.persist(rows_);
    return outcome;
  }

 private:
  BenchmarkSpec spec_for(const PlanPoint& point) const {
    auto spec = registry_.get(point.benchmark);
    if (plan_.spec.runner_override) spec.runner = *plan_.spec.runner_override;
    return spec;
  }

  MeasureResult measure(const RunnerInvocation& inv, const std::optional<EventSet>& events,
                        int runs, bool calibration) {
    auto result = profiler_.measure(inv, events, runs);
    count(result, calibration);
    const bool counting = events && events->group_count() > 0;
    record(inv, result, counting ? MeasurementPass::Events : MeasurementPass::Runtime);
    return result;
  }

  void count(const MeasureResult& result, bool calibration) {
    executions_ += result.executions;
    if (calibration) {
      summary_.calibration_executions += result.executions;
    } else {
      summary_.measurement_executions += result.executions;
    }
    append_unique(warnings_, result.warnings);
  }

  void record(const RunnerInvocation& inv, const MeasureResult& result, MeasurementPass pass) {
    for (const auto& f : result.failures) rows_.push_back(failure_row(inv, pass, f));
  }

  MeasurementRecord measure_phase(const RunnerInvocation& inv, const std::optional<EventSet>& events,
                                  SelfReport* report) {
    auto result = measure(inv, events, plan_.spec.runs_per_point, false);
    if (result.records.empty()) {
      throw PointFailure{"no admitted " + to_string(inv.phase) + " runs: " +
                         (result.failures.empty() ? std::string("unknown failure")
                                                  : result.failures.back().reason)};
    }
    for (const auto& r : result.records) rows_.push_back(to_row(r));
    auto aggregate = aggregate_median(result.records);
    aggregate.pass = result.records.front().pass;
    rows_.push_back(to_row(aggregate));
    if (report != nullptr) *report = result.reports.front();
    return aggregate;
  }

  std::uint64_t repetitions_for(const BenchmarkSpec& spec, const PlanPoint& point,
                                const std::filesystem::path& config_path) {
    if (spec.level != AbstractionLevel::Primitive) return 1;
    if (const auto it = plan_.spec.per_call_estimates.find(spec.name);
        it != plan_.spec.per_call_estimates.end()) {
      return compute_repetitions(it->second);
    }
    const auto inv =
        build_invocation(spec, point.config, RunPhase::Full, point.thread_count, 1, config_path);
    auto result = profiler_.measure(inv, std::nullopt, 1);
    count(result, true);
    if (result.records.empty()) {
      throw PointFailure{"calibration run failed: " + (result.failures.empty()
                                                            ? std::string("unknown failure")
                                                            : result.failures.back().reason)};
    }
    const auto& report = result.reports.front();
    const double estimate = report.inner_roi_seconds.value_or(result.records.front().wall_time);
    return compute_repetitions(estimate > 0 ? estimate : kMinCumulativeSeconds);
  }

  DenoisedMetrics measure_point(const PlanPoint& point, PointOutcome& outcome) {
    const auto spec = spec_for(point);
    const auto id = point_id(point);

    const auto artifacts = store_.artifacts_dir() / config_hash(point.config);
    if (std::filesystem::is_directory(artifacts)) {
      ++summary_.artifacts_reused;
    } else {
      std::filesystem::create_directories(artifacts);
      ++summary_.artifacts_created;
    }

    const auto run_dir = store_.dir() / "runs" / id;
    std::filesystem::create_directories(run_dir);
    RunnerConfigFile file;
    file.benchmark = point.benchmark;
    file.config = point.config;
    file.extra_params = spec.extra_params;
    file.extra_params.merge_patch(plan_.spec.extra_params);
    file.artifact_dir = artifacts;
    const auto config_path = run_dir / "config.json";
    write_runner_config(config_path, file);

    const auto reps = repetitions_for(spec, point, config_path);
    auto invocation = [&](RunPhase phase) {
      return build_invocation(spec, point.config, phase, point.thread_count, reps, config_path);
    };

    SelfReport full_report;
    const auto setup = measure_phase(invocation(RunPhase::Setup), std::nullopt, nullptr);
    auto full = measure_phase(invocation(RunPhase::Full), std::nullopt, &full_report);

    MeasurementRecord setup_with_events = setup;
    if (const auto events = plan_.spec.event_set(); events && events->group_count() > 0) {
      const auto setup_ev = measure_phase(invocation(RunPhase::Setup), events, nullptr);
      const auto full_ev = measure_phase(invocation(RunPhase::Full), events, nullptr);
      setup_with_events.event_counts = setup_ev.event_counts;
      full.event_counts = full_ev.event_counts;
    }

    if (plan_.spec.record_stacks) {
      std::optional<FoldedProfile> folded;
      for (const auto phase : {RunPhase::Setup, RunPhase::Full}) {
        const auto inv = invocation(phase);
        auto stacks = profiler_.record_stacks(inv, plan_.spec.runs_per_point,
                                              run_dir / ("stacks-" + to_string(phase)));
        count(stacks.measurement, false);
        record(inv, stacks.measurement, MeasurementPass::Stacks);
        if (stacks.measurement.records.empty()) {
          throw PointFailure{"no admitted " + to_string(phase) + " stack-sampling runs"};
        }
        for (const auto& r : stacks.measurement.records) rows_.push_back(to_row(r));
        if (phase == RunPhase::Full) folded = std::move(stacks.profile);
      }
      if (folded) {
        const auto stacks_dir = store_.dir() / "stacks";
        std::filesystem::create_directories(stacks_dir);
        const auto path = stacks_dir / (id + ".folded");
        write_text(path, to_folded_text(*folded));
        write_text(stacks_dir / (id + ".svg"), render_svg(*folded, {point.benchmark}));
        outcome.folded_stacks = path;
      }
    }

    auto metrics = derive(denoise(full, setup_with_events));
    if (spec.level == AbstractionLevel::Primitive) {
      metrics = per_call(std::move(metrics), static_cast<std::int64_t>(full_report.repetitions_executed));
    }
    append_unique(warnings_, metrics.warnings);
    metrics.warnings = warnings_;
    rows_.push_back(to_row(metrics));
    return metrics;
  }

  const RunPlan& plan_;
  const Registry& registry_;
  const Profiler& profiler_;
  ResultsStore& store_;
  ExecutionSummary& summary_;
  std::vector<ResultRow> rows_;
  std::vector<std::string> warnings_;
  std::uint64_t executions_ = 0;
};

}  // namespace

std::string to_string(PointStatus status) {
  switch (status) {
    case PointStatus::Executed: return "executed";
    case PointStatus::Cached: return "cached";
    case PointStatus::Failed: return "failed";
  }
  return "executed";
}

std::string ExecutionSummary::describe() const {
  if (all_cached()) return "all points cached";
  std::string out = std::to_string(points_executed) + " executed, " +
                    std::to_string(points_cached) + " cached, " + std::to_string(points_failed) +
                    " failed; " + std::to_string(measurement_executions) +
                    " measurement executions";
  if (calibration_executions > 0) {
    out += " + " + std::to_string(calibration_executions) + " calibration";
  }
  return out;
}

std::string point_id(const PlanPoint& point) {
  return slug(point.benchmark) + "-" + config_hash(point.config).substr(0, 12) + "-t" +
         std::to_string(point.thread_count);
}

ExecutionSummary execute_plan(const RunPlan& plan, const Registry& registry,
                              const Profiler& profiler, ResultsStore& store,
                              const ExecutionOptions& options) {
  ExecutionSummary summary;
  std::set<std::tuple<std::string, CryptoConfig, int>> done;
  for (const auto& row : store.load({RowKind::Denoised, {}, {}, {}})) {
    done.emplace(row.at("benchmark"), get_config(row), get_threads(row));
  }
  PointRunner runner(plan, registry, profiler, store, summary);
  for (const auto& point : plan.points) {
    PointOutcome outcome;
    if (done.contains({point.benchmark, point.config, point.thread_count})) {
      outcome.point = point;
      outcome.status = PointStatus::Cached;
      ++summary.points_cached;
    } else {
      outcome = runner.run(point);
      if (outcome.status == PointStatus::Failed) {
        ++summary.points_failed;
      } else {
        ++summary.points_executed;
      }
    }
    if (options.on_point) options.on_point(outcome);
    summary.points.push_back(std::move(outcome));
  }
  return summary;
}

}  // namespace fheprof
