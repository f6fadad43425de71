// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/registry.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include "fheprof/errors.hpp"

#ifndef FHEPROF_REGISTRY_DIR
#define FHEPROF_REGISTRY_DIR "share/fheprof/registry"
#endif

namespace fheprof {

namespace {

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
}

SecurityTable parse_security_table(const nlohmann::json& doc) {
  SecurityTable table;
  try {
    table.first_mod_bits = doc.at("first_mod_bits").get<int>();
    table.scaling_mod_bits = doc.at("scaling_mod_bits").get<int>();
    for (const auto& [standard_text, per_ring] : doc.at("max_log2_modulus").items()) {
      auto& row = table.max_log2_modulus[parse_security_standard(standard_text)];
      for (const auto& [log2n, bits] : per_ring.items()) {
        row[std::stoi(log2n)] = bits.get<int>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("security standards: ") + e.what());
  }
  if (table.scaling_mod_bits <= 0) throw SchemaError("security standards: scaling_mod_bits <= 0");
  return table;
}

}  // namespace

std::string to_string(AbstractionLevel level) {
  switch (level) {
    case AbstractionLevel::Primitive:
      return "primitive";
    case AbstractionLevel::Microbenchmark:
      return "microbenchmark";
    case AbstractionLevel::Workload:
      return "workload";
  }
  return "primitive";
}

AbstractionLevel parse_abstraction_level(std::string_view text) {
  std::string lowered;
  for (char c : text) lowered.push_back(static_cast<char>(std::tolower(c)));
  if (lowered == "primitive" || lowered == "primitives") return AbstractionLevel::Primitive;
  if (lowered == "microbenchmark" || lowered == "microbenchmarks" || lowered == "micro") {
    return AbstractionLevel::Microbenchmark;
  }
  if (lowered == "workload" || lowered == "workloads") return AbstractionLevel::Workload;
  throw ArgumentError("unknown abstraction level '" + std::string(text) + "'");
}

std::uint64_t OpCountManifest::total() const {
  std::uint64_t sum = 0;
  for (const auto& [_, n] : counts) sum += n;
  return sum;
}

std::uint64_t OpCountManifest::count(std::string_view primitive) const {
  const auto it = counts.find(std::string(primitive));
  return it == counts.end() ? 0 : it->second;
}

OpCountManifest OpCountManifest::merged_with(const OpCountManifest& other) const {
  OpCountManifest out{benchmark + "+" + other.benchmark, counts};
  for (const auto& [p, n] : other.counts) out.counts[p] += n;
  return out;
}

OpCountManifest OpCountManifest::scaled(std::uint64_t factor) const {
  OpCountManifest out{benchmark, counts};
  for (auto& [_, n] : out.counts) n *= factor;
  return out;
}

void to_json(nlohmann::json& j, const OpCountManifest& manifest) {
  j = nlohmann::json{{"benchmark", manifest.benchmark}, {"counts", manifest.counts}};
}

void from_json(const nlohmann::json& j, OpCountManifest& manifest) {
  try {
    manifest.benchmark = j.value("benchmark", std::string{});
    const auto& counts = j.contains("counts") ? j.at("counts") : j;
    manifest.counts.clear();
    for (const auto& [name, value] : counts.items()) {
      if (name == "benchmark") continue;
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
        throw SchemaError("manifest count for '" + name + "' must be a non-negative integer");
      }
      manifest.counts[name] = value.get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("manifest: ") + e.what());
  }
}

std::optional<int> SecurityTable::max_depth(SecurityStandard standard, int log2_ring_dim) const {
  if (standard == SecurityStandard::None) return std::numeric_limits<int>::max();
  const auto row = max_log2_modulus.find(standard);
  if (row == max_log2_modulus.end()) return std::nullopt;
  const auto bits = row->second.find(log2_ring_dim);
  if (bits == row->second.end()) return std::nullopt;
  return std::max(0, (bits->second - first_mod_bits) / scaling_mod_bits);
}

void to_json(nlohmann::json& j, const BenchmarkSpec& spec) {
  j = nlohmann::json{{"name", spec.name},
                     {"display_name", spec.display_name},
                     {"description", spec.description},
                     {"level", to_string(spec.level)},
                     {"runner", spec.runner},
                     {"default_config", spec.default_config},
                     {"extra_params", spec.extra_params}};
}

void from_json(const nlohmann::json& j, BenchmarkSpec& spec) {
  try {
    spec.name = j.at("name").get<std::string>();
    spec.display_name = j.value("display_name", spec.name);
    spec.description = j.value("description", std::string{});
    spec.level = parse_abstraction_level(j.at("level").get<std::string>());
    spec.runner = j.value("runner", std::string{});
    spec.default_config = j.at("default_config").get<CryptoConfig>();
    spec.extra_params = j.value("extra_params", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("benchmark spec: ") + e.what());
  }
}

Registry Registry::load(const std::filesystem::path& dir) {
  Registry registry;
  const auto standards = dir / "security_standards.json";
  if (std::filesystem::exists(standards)) {
    registry.security_ = parse_security_table(read_json_file(standards));
  }

  const auto bench_dir = dir / "benchmarks";
  if (!std::filesystem::is_directory(bench_dir)) {
    throw IoError("registry directory " + bench_dir.string() + " does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(bench_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  struct Doc {
    BenchmarkSpec spec;
    std::optional<OpCountManifest> manifest;
  };
  std::vector<Doc> docs;
  for (const auto& file : files) {
    const auto doc = read_json_file(file);
    Doc d;
    try {
      d.spec = doc.get<BenchmarkSpec>();
    } catch (const SchemaError& e) {
      throw SchemaError(file.string() + ": " + e.what());
    }
    if (doc.contains("manifest")) {
      d.manifest = doc.at("manifest").get<OpCountManifest>();
      d.manifest->benchmark = d.spec.name;
    }
    docs.push_back(std::move(d));
  }
  // Primitives first so manifests can be checked against them.
  std::stable_sort(docs.begin(), docs.end(),
                   [](const Doc& a, const Doc& b) { return a.spec.level < b.spec.level; });
  for (auto& d : docs) registry.add(std::move(d.spec), std::move(d.manifest));
  return registry;
}

std::filesystem::path Registry::default_dir() {
  if (const char* env = std::getenv("FHEPROF_REGISTRY_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return FHEPROF_REGISTRY_DIR;
}

Registry Registry::load_default() { return load(default_dir()); }

void Registry::add(BenchmarkSpec spec, std::optional<OpCountManifest> manifest) {
  if (spec.name.empty()) throw SchemaError("benchmark name is empty");
  if (specs_.contains(spec.name)) throw SchemaError("duplicate benchmark '" + spec.name + "'");
  if (manifest) {
    if (spec.level == AbstractionLevel::Primitive) {
      throw SchemaError("primitive '" + spec.name + "' cannot carry a manifest");
    }
    manifest->benchmark = spec.name;
    check_manifest(*manifest);
    manifests_.emplace(spec.name, std::move(*manifest));
  }
  const auto name = spec.name;
  specs_.emplace(name, std::move(spec));
}

void Registry::check_manifest(const OpCountManifest& manifest) const {
  for (const auto& [primitive, _] : manifest.counts) {
    if (primitive == kOtherPrimitive) continue;
    if (!is_primitive(primitive)) {
      throw SchemaError("manifest '" + manifest.benchmark + "' names unregistered primitive '" +
                        primitive + "'");
    }
  }
  if (!manifest.counts.empty() && manifest.total() == 0) {
    throw SchemaError("manifest '" + manifest.benchmark + "' has only zero counts");
  }
}

std::vector<BenchmarkSpec> Registry::list_benchmarks(
    std::optional<AbstractionLevel> level_filter) const {
  std::vector<BenchmarkSpec> out;
  for (const auto& [_, spec] : specs_) {
    if (!level_filter || spec.level == *level_filter) out.push_back(spec);
  }
  std::sort(out.begin(), out.end(), [](const BenchmarkSpec& a, const BenchmarkSpec& b) {
    return std::tie(a.level, a.name) < std::tie(b.level, b.name);
  });
  return out;
}

bool Registry::contains(std::string_view name) const { return specs_.find(name) != specs_.end(); }

const BenchmarkSpec& Registry::get(std::string_view name) const {
  const auto it = specs_.find(name);
  if (it == specs_.end()) throw UnknownBenchmarkError(std::string(name));
  return it->second;
}

bool Registry::has_manifest(std::string_view name) const {
  return manifests_.find(name) != manifests_.end();
}

OpCountManifest Registry::get_manifest(std::string_view name) const {
  const auto& spec = get(name);
  if (spec.level == AbstractionLevel::Primitive) {
    throw ArgumentError("'" + spec.name + "' is a primitive; manifests describe applications");
  }
  const auto it = manifests_.find(name);
  if (it == manifests_.end()) {
    throw ArgumentError("benchmark '" + spec.name + "' has no operation-count manifest");
  }
  // Materialize the zero entries so callers see the full primitive column.
  OpCountManifest out = it->second;
  for (const auto& p : primitive_names()) out.counts.try_emplace(p, 0);
  return out;
}

std::vector<std::string> Registry::primitive_names() const {
  std::vector<std::string> out;
  for (const auto& [name, spec] : specs_) {
    if (spec.level == AbstractionLevel::Primitive) out.push_back(name);
  }
  return out;
}

bool Registry::is_primitive(std::string_view name) const {
  const auto it = specs_.find(name);
  return it != specs_.end() && it->second.level == AbstractionLevel::Primitive;
}

ResolvedConfig Registry::resolve_config(const BenchmarkSpec& spec,
                                        const ConfigOverrides& overrides) const {
  ResolvedConfig out{spec.default_config, {}};
  auto& c = out.config;
  if (overrides.log2_ring_dim) c.log2_ring_dim = *overrides.log2_ring_dim;
  if (overrides.depth) c.depth = *overrides.depth;
  if (overrides.batch_size) c.batch_size = *overrides.batch_size;
  if (overrides.security_standard) c.security_standard = *overrides.security_standard;

  if (c.security_standard != SecurityStandard::None && c.depth >= 1) {
    const auto cap = security_.max_depth(c.security_standard, c.log2_ring_dim);
    if (!cap || *cap < c.depth) {
      std::optional<int> mandated;
      for (int k = std::max(c.log2_ring_dim, kMinLog2RingDim); k <= kMaxLog2RingDim; ++k) {
        const auto k_cap = security_.max_depth(c.security_standard, k);
        if (k_cap && *k_cap >= c.depth) {
          mandated = k;
          break;
        }
      }
      if (!mandated) {
        throw InvalidConfigError(to_string(c.security_standard) + " admits no ring dimension in [2^" +
                                 std::to_string(kMinLog2RingDim) + ", 2^" +
                                 std::to_string(kMaxLog2RingDim) + "] for depth " +
                                 std::to_string(c.depth));
      }
      std::string origin = overrides.log2_ring_dim ? "override" : "default";
      out.warnings.push_back(to_string(c.security_standard) + " security mandates log2_ring_dim >= " +
                             std::to_string(*mandated) + " at depth " + std::to_string(c.depth) +
                             "; replacing " + origin + " " + std::to_string(c.log2_ring_dim));
      c.log2_ring_dim = *mandated;
    }
  }

  const auto violations = validate_config(c);
  if (!violations.empty()) {
    std::string what = spec.name + ":";
    for (const auto& v : violations) what += " [" + describe(v) + "]";
    throw InvalidConfigError(what);
  }
  return out;
}

}  // namespace fheprof
