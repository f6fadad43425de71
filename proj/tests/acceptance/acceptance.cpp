// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "fheprof/denoise.hpp"
#include "fheprof/errors.hpp"
#include "fheprof/executor.hpp"
#include "fheprof/flamegraph.hpp"
#include "fheprof/perf_model.hpp"
#include "fheprof/registry.hpp"
#include "fheprof/report.hpp"
#include "fheprof/results_store.hpp"
#include "fheprof/sweep.hpp"
#include "test_support.hpp"

using namespace fheprof;
using namespace fheprof::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel_error(double value, long double oracle) {
  if (oracle == 0) return std::abs(value);
  return static_cast<double>(std::abs((value - oracle) / oracle));
}

// 1
Outcome manifest_fidelity() {
  const auto registry = Registry::load(registry_dir());
  const auto table = parse_csv(read_file(fixtures_dir() / "op_counts_table.csv"));
  const auto& header = table.front();
  std::size_t compared = 0;
  std::vector<std::string> mismatches;
  for (std::size_t col = 1; col < header.size(); ++col) {
    const auto manifest = registry.get_manifest(header[col]);
    std::uint64_t table_total = 0;
    for (std::size_t row = 1; row < table.size(); ++row) {
      const auto expected = std::stoull(table[row][col]);
      table_total += expected;
      if (manifest.count(table[row][0]) != expected) {
        mismatches.push_back(header[col] + "/" + table[row][0]);
      }
      ++compared;
    }
    if (manifest.total() != table_total) mismatches.push_back(header[col] + " has extra entries");
  }
  const auto primitives = registry.primitive_names().size();
  const bool pass = mismatches.empty() && compared == 14 * 7 && primitives == 14 &&
                    table.size() == 15 && header.size() == 8;
  return {pass, fmt::format("{} entries compared, {} primitives registered, {} mismatches{}", compared,
                            primitives, mismatches.size(),
                            mismatches.empty() ? "" : " (first: " + mismatches.front() + ")")};
}

// 2
Outcome additive_model() {
  const std::vector<std::string> names{"EvalAdd",   "EvalAdd(Plaintext)", "EvalSub",
                                       "EvalSub(Scalar)", "EvalMult", "EvalMultNoRelin",
                                       "EvalMult(Plaintext)", "EvalMult(Scalar)", "EvalSquare",
                                       "EvalRotate", "EvalFastRotate", "EvalBootstrap",
                                       "EvalChebyshevFunction", "EvalChebyshevSeries"};
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::uint64_t> count(0, 100'000);
  std::uniform_real_distribution<double> log_cost(std::log(1e-6), std::log(10.0));
  std::uniform_int_distribution<std::uint64_t> factor(1, 1000);
  std::uniform_real_distribution<double> cost_factor(1e-3, 1e3);
  double worst = 0;
  int homogeneity = 0, additivity = 0, argmax = 0;
  auto argmax_of = [](const Prediction& p) {
    return std::max_element(p.contributions.begin(), p.contributions.end(),
                            [](const auto& a, const auto& b) { return a.time < b.time; })
        ->primitive;
  };
  for (int i = 0; i < 1000; ++i) {
    const CostKey key{CryptoConfig{}, 1 + static_cast<int>(rng() % 64)};
    PrimitiveCostTable table, scaled_table;
    std::map<std::string, double> cost;
    const double f = cost_factor(rng);
    for (const auto& n : names) {
      cost[n] = std::exp(log_cost(rng));
      table.set(key, n, {cost[n], std::nullopt});
      scaled_table.set(key, n, {cost[n] * f, std::nullopt});
    }
    OpCountManifest a{"a", {}}, b{"b", {}};
    for (const auto& n : names) {
      if (rng() % 3 != 0) a.counts[n] = count(rng);
      if (rng() % 3 != 0) b.counts[n] = count(rng);
    }
    a.counts[names[rng() % names.size()]] += 1;
    b.counts[names[rng() % names.size()]] += 1;

    long double oracle = 0;
    for (const auto& n : names) {
      const auto it = a.counts.find(n);
      if (it != a.counts.end()) oracle += static_cast<long double>(it->second) * cost[n];
    }
    const auto pa = predict(a, table, key);
    worst = std::max(worst, rel_error(pa.total_time, oracle));

    const auto k = factor(rng);
    if (rel_error(predict(a.scaled(k), table, key).total_time,
                  static_cast<long double>(k) * pa.total_time) > 1e-12) {
      ++homogeneity;
    }
    const auto pb = predict(b, table, key);
    if (rel_error(predict(a.merged_with(b), table, key).total_time,
                  static_cast<long double>(pa.total_time) + pb.total_time) > 1e-12) {
      ++additivity;
    }
    const auto ps = predict(a, scaled_table, key);
    if (argmax_of(ps) != argmax_of(pa) || argmax_of(predict(a.scaled(k), table, key)) != argmax_of(pa)) {
      ++argmax;
    }
  }
  const bool pass = worst <= 1e-12 && homogeneity == 0 && additivity == 0 && argmax == 0;
  return {pass, fmt::format("1000 cases, worst relative error {:.2e}; homogeneity/additivity/argmax "
                            "violations {}/{}/{}",
                            worst, homogeneity, additivity, argmax)};
}

// Shared by criteria 3 and 8.
class SyntheticBench {
 public:
  SyntheticBench() {
    suite_.primitives = {{"EvalAdd", 0.0008},
                         {"EvalMult", 0.004},
                         {"EvalMult(Plaintext)", 0.0015},
                         {"EvalRotate", 0.003}};
    suite_.applications = {
        {"Composite", {{"EvalAdd", 178}, {"EvalMult", 16}, {"EvalMult(Plaintext)", 32}, {"EvalRotate", 193}}}};
    write_registry(dir_.path() / "registry", suite_);
    env_ = std::make_unique<ScopedEnv>("FHEPROF_REGISTRY_DIR", (dir_.path() / "registry").string());
    registry_ = Registry::load(dir_.path() / "registry");
  }

  const Registry& registry() const { return registry_; }
  const SyntheticSuite& suite() const { return suite_; }
  std::filesystem::path path(const std::string& name) const { return dir_.path() / name; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [n, _] : suite_.primitives) out.push_back(n);
    out.push_back("Composite");
    return out;
  }

 private:
  TempDir dir_;
  SyntheticSuite suite_;
  std::unique_ptr<ScopedEnv> env_;
  Registry registry_;
};

struct ClosurePoint {
  CostKey key;
  double predicted = 0;
  double measured = 0;
  double error = 0;
};

std::vector<ClosurePoint> closure(const SyntheticBench& bench, const SweepSpec& spec,
                                  const std::filesystem::path& store_dir) {
  const auto plan = generate_sweep(spec, bench.registry());
  auto store = ResultsStore::open(store_dir);
  const Profiler profiler(nullptr, nullptr, {1, true});
  const auto summary = execute_plan(plan, bench.registry(), profiler, store);
  if (summary.points_failed > 0) {
    for (const auto& p : summary.points) {
      if (p.status == PointStatus::Failed) throw Error(p.point.benchmark + ": " + p.reason);
    }
  }
  std::vector<DenoisedMetrics> metrics;
  for (const auto& row : store.load({RowKind::Denoised, {}, {}, {}})) {
    metrics.push_back(denoised_from_row(row));
  }
  const auto table = PrimitiveCostTable::from_metrics(metrics, bench.registry());
  const auto manifest = bench.registry().get_manifest("Composite");
  std::vector<ClosurePoint> out;
  for (const auto& m : metrics) {
    if (m.benchmark != "Composite") continue;
    ClosurePoint c;
    c.key = {m.config, m.thread_count};
    c.predicted = predict(manifest, table, c.key).total_time;
    c.measured = m.roi_time;
    c.error = c.predicted / c.measured - 1.0;
    out.push_back(c);
  }
  return out;
}

// 3
Outcome synthetic_closure() {
  const auto start = Clock::now();
  SyntheticBench bench;

  SweepSpec exact;
  exact.benchmarks = bench.names();
  exact.runs_per_point = 3;
  exact.extra_params = {{"synthetic_model", bench.suite().model(0.0, 7, 0.01)}};
  const auto exact_points = closure(bench, exact, bench.path("exact"));
  if (exact_points.size() != 1) return {false, "expected one composite point without noise"};
  const double exact_error = exact_points[0].error;

  SweepSpec noisy = exact;
  noisy.log2_ring_dims = std::vector<int>{15, 16};
  noisy.thread_counts = {1, 2, 4};
  auto model = bench.suite().model(0.02, std::nullopt, 0.01);
  noisy.extra_params = {{"synthetic_model", model}};
  const auto noisy_points = closure(bench, noisy, bench.path("noisy"));
  std::vector<double> errors;
  double worst = 0;
  for (const auto& p : noisy_points) {
    errors.push_back(p.error);
    worst = std::max(worst, std::abs(p.error));
  }
  const double geomean = aggregate_geomean(errors);
  const double elapsed = seconds_since(start);
  const bool pass = std::abs(exact_error) <= 0.05 && noisy_points.size() == 6 &&
                    std::abs(geomean) <= 0.05 && elapsed < 180.0;
  return {pass, fmt::format("noise 0: signed error {:+.3f}% (limit 5%); noise 2%: geomean {:+.3f}% "
                            "over {} points, worst {:.3f}% (limit 5%); {:.1f} s (limit 180 s)",
                            exact_error * 100, geomean * 100, noisy_points.size(), worst * 100,
                            elapsed)};
}

// 4
Outcome denoiser_arithmetic() {
  MeasurementRecord full, setup;
  full.benchmark = setup.benchmark = "matrix-mult-32";
  setup.phase = RunPhase::Setup;
  full.wall_time = 10.20;
  setup.wall_time = 0.04;
  const auto m = denoise(full, setup);
  const auto roi = fmt::format("{:.2f}", m.roi_time);
  const auto overhead = format_overhead(m.setup_time, m.setup_overhead().value_or(-1));

  full.wall_time = 0.03;
  const auto clamped = denoise(full, setup);
  const bool clamp_ok = clamped.roi_time == 0.0 && !clamped.warnings.empty() &&
                        !clamped.setup_overhead().has_value();
  const bool pass = roi == "10.16" && overhead == "0.04 (0.39%)" && clamp_ok &&
                    std::abs(m.roi_time - 10.16) < 1e-12;
  return {pass, fmt::format("ROI = {} s, setup overhead {}; negative ROI clamped to {} with warning: {}",
                            roi, overhead, clamped.roi_time, clamp_ok ? "yes" : "no")};
}

// 5
Outcome aggregators() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> err(-0.9, 2.0);
  std::uniform_real_distribution<double> val(-100, 100);
  std::uniform_int_distribution<int> len(1, 64);
  double geo_worst = 0, cos_worst = 0;
  for (int i = 0; i < 100; ++i) {
    const auto n = static_cast<std::size_t>(len(rng));
    std::vector<double> e(n), a(n), b(n);
    long double prod = 1, dot = 0, na = 0, nb = 0;
    for (std::size_t j = 0; j < n; ++j) {
      e[j] = err(rng);
      prod *= 1.0L + e[j];
      a[j] = val(rng);
      b[j] = val(rng);
      dot += static_cast<long double>(a[j]) * b[j];
      na += static_cast<long double>(a[j]) * a[j];
      nb += static_cast<long double>(b[j]) * b[j];
    }
    const long double geo = std::pow(prod, 1.0L / n) - 1.0L;
    geo_worst = std::max(geo_worst, static_cast<double>(std::abs(aggregate_geomean(e) - geo)));
    const long double cos = dot / std::sqrt(na * nb);
    cos_worst = std::max(cos_worst, static_cast<double>(std::abs(cosine_similarity(a, b) - cos)));
  }
  const std::vector<double> pair{0.21, 0.0};
  const double g = aggregate_geomean(pair);
  std::vector<double> v(17);
  for (auto& x : v) x = val(rng);
  const double self = cosine_similarity(v, v);
  const bool pass = geo_worst <= 1e-12 && cos_worst <= 1e-12 && std::abs(g - 0.10) <= 1e-12 &&
                    self == 1.0;
  return {pass, fmt::format("100 vectors: geomean max |diff| {:.2e}, cosine max |diff| {:.2e}; "
                            "geomean(+21%, 0%) = {:+.4f}%; cosine(identical) = {}",
                            geo_worst, cos_worst, g * 100, self)};
}

// 6
Outcome flamegraph() {
  std::ifstream in(fixtures_dir() / "perf_script_sample.txt");
  const auto samples = parse_perf_script(in);
  const auto profile = ingest(samples);
  const bool golden = to_folded_text(profile) == read_file(fixtures_dir() / "perf_script_sample.folded");

  std::size_t problems = audit_flamegraph(profile, render_svg(profile, {}), 1200.0).size();
  std::uint64_t sample_weight = 0;
  for (const auto& s : samples) sample_weight += s.weight;
  std::uint64_t folded_weight = 0;
  for (const auto& [_, w] : profile.lines) folded_weight += w;
  bool conserved = sample_weight == profile.total_weight && folded_weight == sample_weight;

  std::mt19937_64 rng(6);
  for (int i = 0; i < 25; ++i) {
    std::vector<StackSample> random;
    std::uint64_t total = 0;
    for (int j = 0; j < 50; ++j) {
      StackSample s;
      const auto depth = 1 + rng() % 7;
      for (std::size_t d = 0; d < depth; ++d) s.frames.push_back("fn" + std::to_string(rng() % 5));
      s.weight = 1 + rng() % 20;
      total += s.weight;
      random.push_back(s);
    }
    const auto p = ingest(random);
    SvgOptions options;
    options.width = 500.0 + 50.0 * i;
    problems += audit_flamegraph(p, render_svg(p, options), options.width).size();
    conserved = conserved && p.total_weight == total;
  }
  const bool pass = golden && problems == 0 && conserved;
  return {pass, fmt::format("folded output {} golden; {} geometry violations over 26 graphs; weight "
                            "conservation {}",
                            golden ? "matches" : "differs from", problems, conserved ? "holds" : "broken")};
}

// 7
Outcome report_fidelity() {
  const auto rows = ResultsStore::read(fixtures_dir() / "report_store");
  const auto report = make_report(rows, ReportKind::Prediction);
  double speedup = 0;
  std::istringstream lines(report.text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("logreg", 0) != 0) continue;
    const auto times = line.find("×");
    const auto space = line.rfind(' ', times);
    speedup = std::stod(line.substr(space + 1, times - space - 1));
  }
  const bool pass = std::abs(speedup - 422.0) <= 0.1 &&
                    report.text.find("422.0×") != std::string::npos && !report.has_gaps();
  return {pass, fmt::format("253.2 s profiling / 0.6 s prediction printed as {:.1f}× (expected 422.0 ± 0.1)",
                            speedup)};
}

// 8
Outcome orchestrator() {
  const auto start = Clock::now();
  SyntheticBench bench;
  SweepSpec spec;
  spec.benchmarks = bench.names();
  spec.thread_counts = {2, 1};
  spec.runs_per_point = 2;
  spec.extra_params = {{"synthetic_model", bench.suite().model(0.0, 7, 0.005)}};
  for (const auto& [n, _] : bench.suite().primitives) spec.per_call_estimates[n] = 1.0;

  const auto plan_a = serialize_plan(generate_sweep(spec, bench.registry()));
  const auto reloaded = nlohmann::json(spec).get<SweepSpec>();
  const auto plan_b = serialize_plan(generate_sweep(reloaded, Registry::load(bench.path("registry"))));
  const bool deterministic = plan_a == plan_b;

  const auto plan = generate_sweep(spec, bench.registry());
  const Profiler profiler(nullptr, nullptr);
  ExecutionSummary first;
  {
    auto store = ResultsStore::open(bench.path("store"));
    first = execute_plan(plan, bench.registry(), profiler, store);
  }
  const auto before = snapshot(bench.path("store"), {".lock"});
  ExecutionSummary second;
  {
    auto store = ResultsStore::open(bench.path("store"));
    second = execute_plan(plan, bench.registry(), profiler, store);
  }
  const bool unchanged = snapshot(bench.path("store"), {".lock"}) == before && second.all_cached() &&
                         second.total_executions() == 0;
  const bool formula = first.measurement_executions == plan.expected_executions() &&
                       first.points_failed == 0 && first.points_executed == plan.points.size();
  const double elapsed = seconds_since(start);
  const bool pass = deterministic && unchanged && formula && elapsed < 120.0;
  return {pass, fmt::format("plan {}; second execution {} ({}); executions {} vs formula {}; {:.1f} s "
                            "(limit 120 s)",
                            deterministic ? "byte-identical" : "differs",
                            unchanged ? "left the store unchanged" : "changed the store",
                            second.describe(), first.measurement_executions,
                            plan.expected_executions(), elapsed)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"manifest fidelity", manifest_fidelity},
      {"additive-model oracle", additive_model},
      {"end-to-end synthetic closure", synthetic_closure},
      {"denoiser arithmetic", denoiser_arithmetic},
      {"aggregators", aggregators},
      {"flamegraph", flamegraph},
      {"report fidelity", report_fidelity},
      {"orchestrator determinism and resume", orchestrator},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    fmt::print("{} criterion {} ({}): {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
               o.detail);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
