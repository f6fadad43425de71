// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fheprof/crypto_config.hpp"
#include "fheprof/denoise.hpp"
#include "fheprof/registry.hpp"

namespace fheprof {

struct CostKey {
  CryptoConfig config;
  int thread_count = 1;

  auto operator<=>(const CostKey&) const = default;
};

/// e.g. "N=2^16 L=10 batch=4096 sec=none threads=8"
std::string describe(const CostKey& key);

struct PrimitiveCost {
  double time = 0.0;
  std::optional<double> energy;
};

/// Measured per-call cost of each primitive at each (config, threads) key.
class PrimitiveCostTable {
 public:
  /// Throws ArgumentError unless time > 0 and energy, when given, > 0.
  void set(const CostKey& key, const std::string& primitive, PrimitiveCost cost);
  const PrimitiveCost* find(const CostKey& key, const std::string& primitive) const;
  std::vector<CostKey> keys() const;
  std::vector<std::string> primitives(const CostKey& key) const;
  bool empty() const { return entries_.empty(); }

  /// Per-call rows of the registry's primitives; rows without a positive
  /// per-call time are skipped.
  static PrimitiveCostTable from_metrics(std::span<const DenoisedMetrics> rows,
                                         const Registry& registry);

 private:
  std::map<CostKey, std::map<std::string, PrimitiveCost>> entries_;
};

struct Contribution {
  std::string primitive;
  std::uint64_t count = 0;
  double time = 0.0;
  std::optional<double> energy;
  double time_share = 0.0;
  std::optional<double> energy_share;
};

struct Prediction {
  std::string benchmark;
  CostKey key;
  double total_time = 0.0;
  /// Absent when any contributing primitive lacks an energy cost.
  std::optional<double> total_energy;
  /// One entry per primitive with a nonzero count, by name.
  std::vector<Contribution> contributions;
};

/// total = sum over primitives of count * per-call cost at `key`. Throws
/// CoverageError naming the primitive and key when a cost is missing.
Prediction predict(const OpCountManifest& manifest, const PrimitiveCostTable& table,
                   const CostKey& key);

struct BreakdownEntry {
  std::string primitive;
  double time_share = 0.0;
  std::optional<double> energy_share;
};

/// Descending time shares rounded to `decimals` places with largest-remainder
/// apportionment, so the rounded shares add up to exactly 1.
/// Throws ArgumentError when the predicted time is zero.
std::vector<BreakdownEntry> breakdown(const Prediction& prediction, int decimals = 4);

struct PredictionError {
  /// predicted / measured - 1
  double time = 0.0;
  std::optional<double> energy;
};

/// Throws ArgumentError when the measured ROI time is not positive.
PredictionError validate(const Prediction& prediction, const DenoisedMetrics& measured);

/// (prod (1 + e_i))^(1/n) - 1; sign-preserving. Throws ArgumentError for an
/// empty list or any 1 + e_i <= 0.
double aggregate_geomean(std::span<const double> errors);

/// Throws ArgumentError on length mismatch or a zero vector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Time shares of `prediction` in `order`, zero for primitives it omits.
std::vector<double> contribution_vector(const Prediction& prediction,
                                        const std::vector<std::string>& order);

struct AlgorithmComparison {
  /// predicted(a) / predicted(b)
  double speedup = 0.0;
  std::optional<double> energy_reduction;
  CostKey key_a;
  CostKey key_b;
  Prediction prediction_a;
  Prediction prediction_b;
};

AlgorithmComparison compare_algorithms(const OpCountManifest& a, const OpCountManifest& b,
                                       const PrimitiveCostTable& table, const CostKey& key_a,
                                       const CostKey& key_b);
AlgorithmComparison compare_algorithms(const OpCountManifest& a, const OpCountManifest& b,
                                       const PrimitiveCostTable& table, const CostKey& key);

struct BenchmarkValidation {
  std::string benchmark;
  AbstractionLevel level = AbstractionLevel::Workload;
  CostKey key;
  double predicted_time = 0.0;
  double measured_time = 0.0;
  std::optional<double> predicted_energy;
  std::optional<double> measured_energy;
  PredictionError error;
};

struct ValidationReport {
  std::vector<BenchmarkValidation> rows;
  /// Geomean errors per abstraction level name.
  std::map<std::string, double> time_geomean;
  std::map<std::string, double> energy_geomean;
  /// Cosine between predicted and measured ROI times over all thread counts
  /// of a benchmark at one configuration.
  std::map<std::string, double> time_cosine;
  std::map<std::string, double> energy_cosine;
};

ValidationReport summarize_validation(std::vector<BenchmarkValidation> rows);

}  // namespace fheprof
