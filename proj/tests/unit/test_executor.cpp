// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <csignal>

#include "fheprof/errors.hpp"
#include "fheprof/executor.hpp"
#include "test_support.hpp"

using namespace fheprof;
using namespace fheprof::testing;

namespace {

class ExecutorTest : public ::testing::Test {
 protected:
  void SetUp() override {
    suite_.primitives = {{"Add", 0.002}, {"Mul", 0.006}};
    suite_.applications = {{"Poly", {{"Add", 3}, {"Mul", 2}}}, {"Crash", {{"Add", 1}}}};
    write_registry(dir_.path() / "registry", suite_);
    env_ = std::make_unique<ScopedEnv>("FHEPROF_REGISTRY_DIR", (dir_.path() / "registry").string());
    registry_ = Registry::load(dir_.path() / "registry");
  }

  SweepSpec spec(std::vector<std::string> benchmarks) const {
    SweepSpec s;
    s.benchmarks = std::move(benchmarks);
    s.thread_counts = {1, 2};
    s.runs_per_point = 2;
    s.extra_params = {{"synthetic_model", suite_.model(0.0, 7, 0.005)}};
    // One call is enough to size repetitions; skips calibration.
    s.per_call_estimates = {{"Add", 1.0}, {"Mul", 1.0}};
    return s;
  }

  std::filesystem::path store_dir() const { return dir_.path() / "store"; }

  ExecutionSummary run(const RunPlan& plan, const Profiler& profiler) {
    auto store = ResultsStore::open(store_dir());
    return execute_plan(plan, registry_, profiler, store);
  }

  TempDir dir_;
  SyntheticSuite suite_;
  std::unique_ptr<ScopedEnv> env_;
  Registry registry_;
};

}  // namespace

TEST_F(ExecutorTest, ExecutesEveryPointAndMatchesTheFormula) {
  const auto plan = generate_sweep(spec({"Add", "Mul", "Poly"}), registry_);
  ASSERT_EQ(plan.points.size(), 6u);
  std::vector<std::string> seen;
  auto store = ResultsStore::open(store_dir());
  const Profiler profiler(std::make_shared<FakeEnergy>(20.0), nullptr);
  const auto summary = execute_plan(plan, registry_, profiler, store,
                                    {[&](const PointOutcome& o) { seen.push_back(o.point.benchmark); }});
  EXPECT_EQ(summary.points_executed, 6u);
  EXPECT_EQ(summary.points_failed, 0u);
  EXPECT_EQ(summary.measurement_executions, plan.expected_executions());
  EXPECT_EQ(summary.calibration_executions, 0u);
  EXPECT_EQ(summary.artifacts_created, 1u);
  EXPECT_EQ(summary.artifacts_reused, 5u);
  EXPECT_EQ(seen.size(), 6u);
  EXPECT_FALSE(summary.all_cached());

  const auto denoised = store.load({RowKind::Denoised, {}, {}, {}});
  ASSERT_EQ(denoised.size(), 6u);
  for (const auto& row : denoised) {
    const auto m = denoised_from_row(row);
    const double scale = 1.0 / m.thread_count;
    if (m.benchmark == "Poly") {
      EXPECT_FALSE(m.per_call_time.has_value());
      EXPECT_NEAR(m.roi_time, (3 * 0.002 + 2 * 0.006) * scale, 0.004);
    } else {
      ASSERT_TRUE(m.per_call_time.has_value());
      EXPECT_EQ(m.calls, 1u);
      EXPECT_NEAR(*m.per_call_time, suite_.primitives.at(m.benchmark) * scale, 0.003);
      EXPECT_TRUE(m.per_call_energy.has_value());
    }
    EXPECT_TRUE(m.roi_energy.has_value());
  }
  // runs + aggregate per phase
  EXPECT_EQ(store.load({RowKind::Measurement, {}, {}, {}}).size(), 6u * 2 * (2 + 1));
}

TEST_F(ExecutorTest, SecondExecutionLeavesStoreUnchanged) {
  const auto plan = generate_sweep(spec({"Add", "Poly"}), registry_);
  const Profiler profiler(nullptr, nullptr);
  const auto first = run(plan, profiler);
  EXPECT_EQ(first.points_executed, plan.points.size());
  const auto before = snapshot(store_dir(), {".lock"});
  const auto second = run(plan, profiler);
  EXPECT_TRUE(second.all_cached());
  EXPECT_EQ(second.describe(), "all points cached");
  EXPECT_EQ(second.total_executions(), 0u);
  for (const auto& p : second.points) EXPECT_EQ(p.status, PointStatus::Cached);
  EXPECT_EQ(snapshot(store_dir(), {".lock"}), before);
}

TEST_F(ExecutorTest, ResumeRunsOnlyMissingPoints) {
  const Profiler profiler(nullptr, nullptr);
  run(generate_sweep(spec({"Add"}), registry_), profiler);
  const auto plan = generate_sweep(spec({"Add", "Mul"}), registry_);
  const auto summary = run(plan, profiler);
  EXPECT_EQ(summary.points_cached, 2u);
  EXPECT_EQ(summary.points_executed, 2u);
  EXPECT_EQ(summary.measurement_executions, plan.expected_executions() / 2);
  EXPECT_NE(summary.describe().find("2 executed, 2 cached, 0 failed"), std::string::npos);
}

TEST_F(ExecutorTest, FailingPointIsRecordedAndOthersContinue) {
  auto s = spec({"Add", "Crash"});
  s.extra_params["abort_benchmarks"] = {"Crash"};
  s.thread_counts = {1};
  const auto plan = generate_sweep(s, registry_);
  const Profiler profiler(nullptr, nullptr, {0, true});
  const auto summary = run(plan, profiler);
  EXPECT_EQ(summary.points_executed, 1u);
  EXPECT_EQ(summary.points_failed, 1u);
  const auto& crash = *std::find_if(summary.points.begin(), summary.points.end(),
                                    [](const auto& p) { return p.point.benchmark == "Crash"; });
  EXPECT_EQ(crash.status, PointStatus::Failed);
  EXPECT_NE(crash.reason.find("no admitted setup runs"), std::string::npos);
  const auto failures = ResultsStore::read(store_dir(), {RowKind::Failure, "Crash", {}, {}});
  EXPECT_EQ(failures.size(), 2u);
  EXPECT_EQ(failures[0].at("exit_status"), std::to_string(128 + SIGABRT));
  EXPECT_TRUE(ResultsStore::read(store_dir(), {RowKind::Denoised, "Crash", {}, {}}).empty());
  // A failed point is retried by the next execution.
  const auto again = run(plan, profiler);
  EXPECT_EQ(again.points_cached, 1u);
  EXPECT_EQ(again.points_failed, 1u);
}

TEST_F(ExecutorTest, CalibrationCountedSeparately) {
  auto s = spec({"Add", "Mul"});
  s.per_call_estimates.clear();
  s.thread_counts = {1};
  s.runs_per_point = 1;
  const auto plan = generate_sweep(s, registry_);
  const Profiler profiler(nullptr, nullptr);
  const auto summary = run(plan, profiler);
  EXPECT_EQ(summary.calibration_executions, 2u);
  EXPECT_EQ(summary.measurement_executions, plan.expected_executions());
  EXPECT_EQ(summary.total_executions(), plan.expected_executions() + 2);
  for (const auto& p : summary.points) {
    ASSERT_TRUE(p.metrics.has_value());
    const double oracle = kMinCumulativeSeconds / suite_.primitives.at(p.point.benchmark);
    EXPECT_NEAR(static_cast<double>(p.metrics->calls), oracle, 0.1 * oracle);
    EXPECT_NEAR(*p.metrics->per_call_time, suite_.primitives.at(p.point.benchmark), 5e-4);
  }
  EXPECT_NE(summary.describe().find("+ 2 calibration"), std::string::npos);
}

TEST_F(ExecutorTest, EventsPassUsesEveryGroup) {
  auto s = spec({"Poly"});
  s.thread_counts = {1};
  s.events = std::vector<std::string>{"instructions", "cpu-cycles", "branches", "branch-misses"};
  s.counter_budget = 2;
  const auto plan = generate_sweep(s, registry_);
  ASSERT_EQ(plan.event_groups(), 2u);
  auto events = std::make_shared<FakeEvents>(1000);
  const Profiler profiler(nullptr, events);
  const auto summary = run(plan, profiler);
  EXPECT_EQ(summary.measurement_executions, plan.expected_executions());
  EXPECT_EQ(events->attached.size(), 2u * 2 * 2);
  const auto m = *summary.points[0].metrics;
  // Identical fake counts in both phases cancel out.
  EXPECT_EQ(m.roi_events.size(), 4u);
  EXPECT_EQ(m.roi_events.at("instructions"), 0.0);
  EXPECT_FALSE(m.ipc.has_value());
}

TEST_F(ExecutorTest, EventsWithoutBackendFailThePoint) {
  auto s = spec({"Poly"});
  s.thread_counts = {1};
  s.events = std::vector<std::string>{"instructions"};
  const auto summary = run(generate_sweep(s, registry_), Profiler(nullptr, nullptr));
  EXPECT_EQ(summary.points_failed, 1u);
  EXPECT_FALSE(summary.points[0].reason.empty());
}

TEST_F(ExecutorTest, StackPassWritesFoldedProfile) {
  auto s = spec({"Poly"});
  s.thread_counts = {1};
  s.record_stacks = true;
  const auto plan = generate_sweep(s, registry_);
  Profiler profiler(nullptr, nullptr);
  profiler.set_stack_sampler(
      std::make_shared<FakeStackSampler>(std::vector<StackSample>{{{"Poly", "main", "Mul"}, 3}}));
  const auto summary = run(plan, profiler);
  ASSERT_EQ(summary.points_executed, 1u);
  EXPECT_EQ(summary.measurement_executions, plan.expected_executions());
  const auto& folded = summary.points[0].folded_stacks;
  ASSERT_TRUE(folded.has_value());
  // two runs of three samples each
  EXPECT_EQ(read_file(*folded), "Poly;main;Mul 6\n");
  auto svg = *folded;
  svg.replace_extension(".svg");
  EXPECT_TRUE(std::filesystem::exists(svg));
}

TEST_F(ExecutorTest, RunnerOverrideReplacesExecutable) {
  auto s = spec({"Add"});
  s.thread_counts = {1};
  s.runner_override = (dir_.path() / "missing-runner").string();
  const auto summary = run(generate_sweep(s, registry_), Profiler(nullptr, nullptr, {0, true}));
  EXPECT_EQ(summary.points_failed, 1u);
}

TEST(PointId, StableAndReadable) {
  PlanPoint p{"EvalMult(Plaintext)", AbstractionLevel::Primitive, CryptoConfig{}, 4, {}};
  const auto id = point_id(p);
  EXPECT_EQ(id, "evalmult-plaintext-" + config_hash(CryptoConfig{}).substr(0, 12) + "-t4");
  EXPECT_EQ(point_id(p), id);
}
