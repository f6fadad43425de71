// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "fheprof/errors.hpp"
#include "fheprof/executor.hpp"
#include "fheprof/flamegraph.hpp"
#include "fheprof/perf_model.hpp"
#include "fheprof/registry.hpp"
#include "fheprof/report.hpp"
#include "fheprof/results_store.hpp"
#include "fheprof/sweep.hpp"
#include "point_spec.hpp"

namespace fs = std::filesystem;
using namespace fheprof;

namespace {

struct Globals {
  std::string store = "fheprof-results";
  std::string registry;
  std::string runner;
};

Registry load_registry(const Globals& g) {
  if (g.registry.empty()) return Registry::load_default();
  // Runners resolve manifests through the same variable.
  ::setenv("FHEPROF_REGISTRY_DIR", g.registry.c_str(), 1);
  return Registry::load(g.registry);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

std::string opt(const std::optional<double>& v, const char* spec = "{:.4g}") {
  return v ? fmt::format(fmt::runtime(spec), *v) : "n/a";
}

// A registered benchmark name, a primitive (one call), or a JSON manifest file
// holding either {"benchmark", "counts"} or a registry document with "manifest".
OpCountManifest load_manifest(const Registry& registry, const std::string& arg) {
  if (registry.has_manifest(arg)) return registry.get_manifest(arg);
  if (registry.is_primitive(arg)) return OpCountManifest{arg, {{arg, 1}}};
  if (!fs::exists(arg)) throw UnknownBenchmarkError(arg);
  const auto text = read_file(arg);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(arg + ": " + e.what(), e.byte);
  }
  OpCountManifest manifest;
  if (doc.contains("counts")) {
    manifest = doc.get<OpCountManifest>();
  } else if (doc.contains("manifest")) {
    manifest = nlohmann::json{{"counts", doc.at("manifest")}}.get<OpCountManifest>();
    manifest.benchmark = doc.value("name", std::string{});
  } else {
    throw SchemaError(arg + ": expected a 'counts' or 'manifest' object");
  }
  if (manifest.benchmark.empty()) manifest.benchmark = fs::path(arg).stem().string();
  registry.check_manifest(manifest);
  return manifest;
}

CryptoConfig defaults_for(const Registry& registry, const std::string& name) {
  return registry.contains(name) ? registry.get(name).default_config : CryptoConfig{};
}

PrimitiveCostTable cost_table(const Globals& g, const Registry& registry) {
  std::vector<DenoisedMetrics> metrics;
  for (const auto& row : ResultsStore::read(g.store, {RowKind::Denoised, {}, {}, {}})) {
    metrics.push_back(denoised_from_row(row));
  }
  return PrimitiveCostTable::from_metrics(metrics, registry);
}

void print_prediction(const Prediction& p) {
  fmt::print("{} at {}\n", p.benchmark, describe(p.key));
  fmt::print("  predicted ROI time   {:.6g} s\n", p.total_time);
  fmt::print("  predicted ROI energy {}\n", p.total_energy ? fmt::format("{:.6g} J", *p.total_energy) : "n/a");
  if (p.total_time <= 0) return;
  std::vector<std::vector<std::string>> body;
  for (const auto& e : breakdown(p)) {
    std::uint64_t count = 0;
    for (const auto& c : p.contributions) {
      if (c.primitive == e.primitive) count = c.count;
    }
    body.push_back({e.primitive, std::to_string(count), fmt::format("{:.2f}%", e.time_share * 100),
                    e.energy_share ? fmt::format("{:.2f}%", *e.energy_share * 100) : "n/a"});
  }
  std::cout << format_table({"Primitive", "Calls", "Time share", "Energy share"}, body);
}

void print_metrics(const DenoisedMetrics& m) {
  fmt::print("{} at {} threads={}\n", m.benchmark, describe(m.config), m.thread_count);
  std::vector<std::vector<std::string>> body{
      {"full time (s)", fmt::format("{:.6g}", m.full_time)},
      {"setup time (s)", fmt::format("{:.6g}", m.setup_time)},
      {"ROI time (s)", fmt::format("{:.6g}", m.roi_time)},
      {"setup overhead", m.setup_overhead() ? fmt::format("{:.2f}%", *m.setup_overhead() * 100) : "n/a"},
      {"ROI energy (J)", opt(m.roi_energy)},
      {"average power (W)", opt(m.avg_power)},
      {"IPC", opt(m.ipc, "{:.3f}")},
  };
  if (m.per_call_time) {
    body.push_back({"calls", std::to_string(m.calls)});
    body.push_back({"per-call time (s)", fmt::format("{:.6g}", *m.per_call_time)});
    body.push_back({"per-call energy (J)", opt(m.per_call_energy)});
  }
  for (const auto& [event, value] : m.roi_events) {
    body.push_back({"ROI " + event, fmt::format("{:.0f}", value)});
  }
  std::cout << format_table({"Metric", "Value"}, body);
  for (const auto& w : m.warnings) fmt::print(stderr, "warning: {}\n", w);
}

void print_outcome(const PointOutcome& o) {
  const auto where = o.point.benchmark + " " + describe(o.point.config) + " threads=" +
                     std::to_string(o.point.thread_count);
  switch (o.status) {
    case PointStatus::Cached: fmt::print("[cached]   {}\n", where); break;
    case PointStatus::Executed:
      fmt::print("[executed] {} ({} executions)\n", where, o.executions);
      break;
    case PointStatus::Failed: fmt::print("[failed]   {}: {}\n", where, o.reason); break;
  }
  std::cout << std::flush;
}

ExecutionSummary run_plan(const Globals& g, const Registry& registry, SweepSpec spec) {
  if (!g.runner.empty()) spec.runner_override = fs::absolute(g.runner).string();
  const auto plan = generate_sweep(spec, registry);
  for (const auto& d : plan.dropped) {
    fmt::print(stderr, "dropped {} {}: {}\n", d.benchmark, d.requested, d.reason);
  }
  auto store = ResultsStore::open(g.store);
  const auto profiler = Profiler::for_host();
  ExecutionOptions options;
  options.on_point = print_outcome;
  auto summary = execute_plan(plan, registry, profiler, store, options);
  fmt::print("{}\n", summary.describe());
  return summary;
}

std::optional<DenoisedMetrics> stored_metrics(const Globals& g, const PlanPoint& point) {
  const auto rows =
      ResultsStore::read(g.store, {RowKind::Denoised, point.benchmark, point.config, point.thread_count});
  if (rows.empty()) return std::nullopt;
  return denoised_from_row(rows.back());
}

void add_config_options(CLI::App* cmd, SweepSpec& spec, std::optional<int>& log_n,
                        std::optional<int>& depth, std::optional<std::uint64_t>& batch,
                        std::string& security) {
  cmd->add_option("--log-ring-dim", log_n, "Ring dimension exponent (N = 2^k)");
  cmd->add_option("--depth", depth, "Multiplicative depth");
  cmd->add_option("--batch", batch, "Batch size");
  cmd->add_option("--security", security, "Security standard: none, 128, 192, 256");
  cmd->add_option("--runs", spec.runs_per_point, "Runs per point (median)")->check(CLI::PositiveNumber);
}

void apply_config_options(SweepSpec& spec, const std::optional<int>& log_n,
                          const std::optional<int>& depth, const std::optional<std::uint64_t>& batch,
                          const std::string& security) {
  if (log_n) spec.log2_ring_dims = std::vector<int>{*log_n};
  if (depth) spec.depths = std::vector<int>{*depth};
  if (batch) spec.batch_sizes = std::vector<std::uint64_t>{*batch};
  if (!security.empty()) spec.security_standards = std::vector{parse_security_standard(security)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characterization and cost modeling of CKKS workloads"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--store", g.store, "Results store directory")->capture_default_str();
  app.add_option("--registry", g.registry, "Registry directory (default: built-in)");
  app.add_option("--runner", g.runner, "Runner executable used for every benchmark");

  int exit_code = 0;

  // bench
  auto* bench = app.add_subcommand("bench", "Inspect the benchmark registry");
  bench->require_subcommand(1);
  std::string level_filter;
  auto* bench_list = bench->add_subcommand("list", "List registered benchmarks");
  bench_list->add_option("--level", level_filter, "primitive, microbenchmark or workload");
  bench_list->callback([&] {
    const auto registry = load_registry(g);
    std::optional<AbstractionLevel> level;
    if (!level_filter.empty()) level = parse_abstraction_level(level_filter);
    std::vector<std::vector<std::string>> body;
    for (const auto& s : registry.list_benchmarks(level)) {
      body.push_back({s.name, to_string(s.level), s.display_name, describe(s.default_config),
                      registry.has_manifest(s.name) ? std::to_string(registry.get_manifest(s.name).total())
                                                    : "-"});
    }
    std::cout << format_table({"Name", "Level", "Display name", "Default config", "Ops"}, body);
  });
  std::string show_name;
  auto* bench_show = bench->add_subcommand("show", "Show one benchmark and its manifest");
  bench_show->add_option("name", show_name)->required();
  bench_show->callback([&] {
    const auto registry = load_registry(g);
    const auto& s = registry.get(show_name);
    std::cout << format_table({"Field", "Value"},
                              {{"name", s.name},
                               {"display name", s.display_name},
                               {"level", to_string(s.level)},
                               {"description", s.description},
                               {"runner", s.runner},
                               {"default config", describe(s.default_config)},
                               {"extra params", s.extra_params.dump()}});
    if (registry.has_manifest(s.name)) {
      const auto m = registry.get_manifest(s.name);
      std::vector<std::vector<std::string>> body;
      for (const auto& [p, c] : m.counts) {
        if (c > 0) body.push_back({p, std::to_string(c)});
      }
      body.push_back({"total", std::to_string(m.total())});
      std::cout << "\n" << format_table({"Primitive", "Calls"}, body);
    }
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Plan or run a parameter sweep");
  sweep->require_subcommand(1);
  std::string sweep_file;
  std::string plan_out;
  auto* sweep_plan = sweep->add_subcommand("plan", "Print the resolved run plan");
  sweep_plan->add_option("specfile", sweep_file)->required()->check(CLI::ExistingFile);
  sweep_plan->add_option("-o,--output", plan_out, "Write the plan here instead of stdout");
  sweep_plan->callback([&] {
    const auto registry = load_registry(g);
    auto spec = load_sweep_spec(sweep_file);
    if (!g.runner.empty()) spec.runner_override = fs::absolute(g.runner).string();
    const auto text = serialize_plan(generate_sweep(spec, registry));
    if (plan_out.empty()) {
      std::cout << text;
    } else {
      write_file(plan_out, text);
    }
  });
  auto* sweep_run = sweep->add_subcommand("run", "Execute every pending point of a sweep");
  sweep_run->add_option("specfile", sweep_file)->required()->check(CLI::ExistingFile);
  sweep_run->callback([&] {
    const auto registry = load_registry(g);
    const auto summary = run_plan(g, registry, load_sweep_spec(sweep_file));
    if (summary.points_failed > 0) exit_code = 1;
  });

  // profile
  SweepSpec profile_spec;
  std::string profile_name;
  std::vector<int> profile_threads;
  std::vector<std::string> profile_events;
  bool profile_default_events = false;
  std::optional<int> log_n;
  std::optional<int> depth;
  std::optional<std::uint64_t> batch;
  std::string security;
  auto* profile = app.add_subcommand("profile", "Measure one benchmark and denoise to its ROI");
  profile->add_option("benchmark", profile_name)->required();
  profile->add_option("--threads", profile_threads, "Thread counts")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  profile->add_option("--events", profile_events, "Performance events to count")->delimiter(',');
  profile->add_flag("--default-events", profile_default_events, "Count the default event catalog");
  profile->add_flag("--stacks", profile_spec.record_stacks, "Also record call stacks");
  add_config_options(profile, profile_spec, log_n, depth, batch, security);
  profile->callback([&] {
    const auto registry = load_registry(g);
    profile_spec.benchmarks = {profile_name};
    if (!profile_threads.empty()) profile_spec.thread_counts = profile_threads;
    if (profile_default_events) profile_spec.events = default_event_names();
    if (!profile_events.empty()) profile_spec.events = profile_events;
    apply_config_options(profile_spec, log_n, depth, batch, security);
    const auto summary = run_plan(g, registry, profile_spec);
    for (const auto& o : summary.points) {
      const auto m = o.metrics ? o.metrics : stored_metrics(g, o.point);
      if (m) {
        std::cout << "\n";
        print_metrics(*m);
      }
    }
    if (summary.points_failed > 0) exit_code = 1;
  });

  // flamegraph
  SweepSpec flame_spec;
  std::string flame_name;
  std::string flame_script;
  std::string flame_folded;
  std::string flame_out;
  int flame_threads = 1;
  int flame_top = 10;
  std::optional<int> f_log_n;
  std::optional<int> f_depth;
  std::optional<std::uint64_t> f_batch;
  std::string f_security;
  auto* flame = app.add_subcommand("flamegraph", "Record call stacks and render a flame graph");
  flame->add_option("benchmark", flame_name, "Benchmark to sample")->required();
  flame->add_option("--from-script", flame_script, "Fold an existing perf script dump instead")
      ->check(CLI::ExistingFile);
  flame->add_option("--from-folded", flame_folded, "Render an existing folded file instead")
      ->check(CLI::ExistingFile);
  flame->add_option("-o,--output", flame_out, "Output prefix for .folded and .svg");
  flame->add_option("--threads", flame_threads)->check(CLI::PositiveNumber);
  flame->add_option("--top", flame_top, "Functions listed by inclusive share")->check(CLI::PositiveNumber);
  add_config_options(flame, flame_spec, f_log_n, f_depth, f_batch, f_security);
  flame->callback([&] {
    std::optional<FoldedProfile> profile;
    if (!flame_script.empty()) {
      std::ifstream in(flame_script);
      const auto samples = parse_perf_script(in);
      profile = ingest(samples);
    } else if (!flame_folded.empty()) {
      profile = parse_folded_text(read_file(flame_folded));
    } else {
      const auto registry = load_registry(g);
      flame_spec.benchmarks = {flame_name};
      flame_spec.thread_counts = {flame_threads};
      flame_spec.record_stacks = true;
      apply_config_options(flame_spec, f_log_n, f_depth, f_batch, f_security);
      const auto summary = run_plan(g, registry, flame_spec);
      if (summary.points_failed > 0) {
        exit_code = 1;
        return;
      }
      const auto folded = fs::path(g.store) / "stacks" / (point_id(summary.points.front().point) + ".folded");
      if (!fs::exists(folded)) {
        throw Error("no stack profile stored for this point; it was measured without --stacks");
      }
      profile = parse_folded_text(read_file(folded));
    }
    const fs::path prefix = flame_out.empty() ? fs::path(flame_name) : fs::path(flame_out);
    write_file(prefix.string() + ".folded", to_folded_text(*profile));
    write_file(prefix.string() + ".svg", render_svg(*profile, {flame_name}));
    fmt::print("wrote {0}.folded and {0}.svg ({1} samples)\n", prefix.string(), profile->total_weight);
    std::vector<std::vector<std::string>> body;
    for (const auto& f : top_functions(*profile, flame_top)) {
      body.push_back({f.function, fmt::format("{:.2f}%", f.fraction * 100)});
    }
    std::cout << format_table({"Function", "Inclusive"}, body);
  });

  // predict
  std::string predict_target;
  std::string predict_at;
  auto* predict_cmd = app.add_subcommand("predict", "Predict ROI cost from primitive measurements");
  predict_cmd->add_option("target", predict_target, "Benchmark name or manifest file")->required();
  predict_cmd->add_option("--at", predict_at, "e.g. N=2^16,L=10,batch=4096,sec=none,threads=8");
  predict_cmd->callback([&] {
    const auto registry = load_registry(g);
    const auto manifest = load_manifest(registry, predict_target);
    const auto key = cli::parse_point_spec(predict_at).resolve(defaults_for(registry, manifest.benchmark));
    const auto table = cost_table(g, registry);
    const auto start = std::chrono::steady_clock::now();
    const auto p = predict(manifest, table, key);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    print_prediction(p);
    fmt::print("model evaluation took {:.3g} s\n", elapsed.count());
    ResultsStore::open(g.store).persist({to_row(p, elapsed.count())});
  });

  // validate
  std::string validate_name;
  auto* validate_cmd =
      app.add_subcommand("validate", "Compare predictions with measured ROI for a benchmark");
  validate_cmd->add_option("benchmark", validate_name)->required();
  validate_cmd->callback([&] {
    const auto registry = load_registry(g);
    const auto& spec = registry.get(validate_name);
    const auto manifest = load_manifest(registry, validate_name);
    const auto table = cost_table(g, registry);
    const auto measured =
        ResultsStore::read(g.store, {RowKind::Denoised, validate_name, std::nullopt, std::nullopt});
    if (measured.empty()) {
      fmt::print(stderr, "gap: no measured {} rows in {}; run `fheprof profile {}` first\n",
                 validate_name, g.store, validate_name);
      exit_code = 1;
      return;
    }
    std::vector<ResultRow> rows;
    for (const auto& row : measured) {
      const auto m = denoised_from_row(row);
      const CostKey key{m.config, m.thread_count};
      try {
        const auto p = predict(manifest, table, key);
        BenchmarkValidation v{validate_name, spec.level, key, p.total_time, m.roi_time,
                              p.total_energy, m.roi_energy, validate(p, m)};
        rows.push_back(to_row(v));
      } catch (const CoverageError& e) {
        fmt::print(stderr, "gap: {}\n", e.what());
        exit_code = 1;
      }
    }
    if (rows.empty()) return;
    ResultsStore::open(g.store).persist(rows);
    std::cout << make_report(rows, ReportKind::Validation).text;
  });

  // compare
  std::string compare_a;
  std::string compare_b;
  std::string compare_at;
  std::string compare_at_b;
  auto* compare = app.add_subcommand("compare", "Compare two algorithms by predicted cost");
  compare->add_option("manifestA", compare_a)->required();
  compare->add_option("manifestB", compare_b)->required();
  compare->add_option("--at", compare_at, "Point for both, or for A when --at-b is given");
  compare->add_option("--at-b", compare_at_b, "Point for B");
  compare->callback([&] {
    const auto registry = load_registry(g);
    const auto a = load_manifest(registry, compare_a);
    const auto b = load_manifest(registry, compare_b);
    const auto key_a = cli::parse_point_spec(compare_at).resolve(defaults_for(registry, a.benchmark));
    const auto key_b = compare_at_b.empty()
                           ? key_a
                           : cli::parse_point_spec(compare_at_b).resolve(defaults_for(registry, b.benchmark));
    const auto c = compare_algorithms(a, b, cost_table(g, registry), key_a, key_b);
    print_prediction(c.prediction_a);
    std::cout << "\n";
    print_prediction(c.prediction_b);
    fmt::print("\nspeedup of B over A: {:.3f}×\n", c.speedup);
    fmt::print("energy reduction:    {}\n",
               c.energy_reduction ? fmt::format("{:.3f}×", *c.energy_reduction) : "n/a");
  });

  // report
  std::string report_kind;
  auto* report = app.add_subcommand("report", "Render a report from the results store");
  report->add_option("kind", report_kind, "overhead, prediction, series or validation")->required();
  report->callback([&] {
    const auto r = make_report(ResultsStore::read(g.store), parse_report_kind(report_kind));
    std::cout << r.text;
    for (const auto& gap : r.gaps) fmt::print(stderr, "gap: {}\n", gap);
    if (r.text.empty()) exit_code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    fmt::print(stderr, "fheprof: {}\n", e.what());
    return 1;
  }
  return exit_code;
}
