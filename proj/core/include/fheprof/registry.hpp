// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fheprof/crypto_config.hpp"

namespace fheprof {

/// Benchmarks are ordered by ascending complexity.
enum class AbstractionLevel { Primitive = 0, Microbenchmark = 1, Workload = 2 };

std::string to_string(AbstractionLevel level);
AbstractionLevel parse_abstraction_level(std::string_view text);

/// Reserved manifest key absorbing operations outside the primitive catalog.
inline constexpr std::string_view kOtherPrimitive = "other";

struct BenchmarkSpec {
  std::string name;
  std::string display_name;
  std::string description;
  AbstractionLevel level = AbstractionLevel::Primitive;
  /// Executable implementing the runner protocol.
  std::string runner;
  CryptoConfig default_config;
  /// Benchmark-specific knobs (matrix size, ...) with their defaults.
  nlohmann::json extra_params = nlohmann::json::object();
};

/// Invocation count per primitive for one application.
struct OpCountManifest {
  std::string benchmark;
  std::map<std::string, std::uint64_t> counts;

  std::uint64_t total() const;
  std::uint64_t count(std::string_view primitive) const;
  /// Count-wise sum of two manifests.
  OpCountManifest merged_with(const OpCountManifest& other) const;
  /// Every count multiplied by `factor`.
  OpCountManifest scaled(std::uint64_t factor) const;
};

void to_json(nlohmann::json& j, const OpCountManifest& manifest);
void from_json(const nlohmann::json& j, OpCountManifest& manifest);

/// Largest modulus bit width each standard allows per ring dimension, plus
/// the modulus chain assumptions used to turn it into a depth cap.
struct SecurityTable {
  int first_mod_bits = 60;
  int scaling_mod_bits = 50;
  std::map<SecurityStandard, std::map<int, int>> max_log2_modulus;

  /// Deepest circuit the standard admits at 2^log2_ring_dim, or nullopt when
  /// the standard does not list that ring dimension. Unbounded for None.
  std::optional<int> max_depth(SecurityStandard standard, int log2_ring_dim) const;
};

struct ResolvedConfig {
  CryptoConfig config;
  std::vector<std::string> warnings;
};

/// Catalog of benchmarks at every abstraction level. Read-only once loaded.
class Registry {
 public:
  /// Loads `dir/benchmarks/*.json` and `dir/security_standards.json`.
  static Registry load(const std::filesystem::path& dir);
  /// $FHEPROF_REGISTRY_DIR when set, else the directory configured at build time.
  static Registry load_default();
  static std::filesystem::path default_dir();

  void add(BenchmarkSpec spec, std::optional<OpCountManifest> manifest = std::nullopt);
  void set_security_table(SecurityTable table) { security_ = std::move(table); }

  /// Sorted by (level, name); `level_filter` restricts to one level.
  std::vector<BenchmarkSpec> list_benchmarks(
      std::optional<AbstractionLevel> level_filter = std::nullopt) const;

  bool contains(std::string_view name) const;
  const BenchmarkSpec& get(std::string_view name) const;
  bool has_manifest(std::string_view name) const;
  OpCountManifest get_manifest(std::string_view name) const;
  std::vector<std::string> primitive_names() const;
  bool is_primitive(std::string_view name) const;

  /// Defaults, then overrides, then the security standard's mandate.
  ResolvedConfig resolve_config(const BenchmarkSpec& spec, const ConfigOverrides& overrides) const;

  const SecurityTable& security() const { return security_; }

  /// Keys must be registered primitives or "other"; throws SchemaError otherwise.
  void check_manifest(const OpCountManifest& manifest) const;

 private:
  std::map<std::string, BenchmarkSpec, std::less<>> specs_;
  std::map<std::string, OpCountManifest, std::less<>> manifests_;
  SecurityTable security_;
};

void to_json(nlohmann::json& j, const BenchmarkSpec& spec);
void from_json(const nlohmann::json& j, BenchmarkSpec& spec);

}  // namespace fheprof
