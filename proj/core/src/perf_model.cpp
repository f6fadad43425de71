// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/perf_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fheprof/errors.hpp"

namespace fheprof {

namespace {

// Rounds shares to integer units of 10^-decimals that sum to 10^decimals.
std::vector<double> apportion(const std::vector<double>& shares, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const auto target = static_cast<std::int64_t>(std::llround(scale));
  std::vector<std::int64_t> units(shares.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double exact = shares[i] * scale;
    units[i] = static_cast<std::int64_t>(std::floor(exact));
    assigned += units[i];
    remainders.emplace_back(exact - static_cast<double>(units[i]), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t j = 0; assigned < target && !remainders.empty();
       j = (j + 1) % remainders.size()) {
    ++units[remainders[j].second];
    ++assigned;
  }
  for (std::size_t j = remainders.size(); assigned > target && j-- > 0;) {
    auto& u = units[remainders[j].second];
    if (u > 0) {
      --u;
      --assigned;
    }
  }
  std::vector<double> out;
  out.reserve(units.size());
  for (const auto u : units) out.push_back(static_cast<double>(u) / scale);
  return out;
}

}  // namespace

std::string describe(const CostKey& key) {
  return describe(key.config) + " threads=" + std::to_string(key.thread_count);
}

void PrimitiveCostTable::set(const CostKey& key, const std::string& primitive, PrimitiveCost cost) {
  if (!(cost.time > 0)) {
    throw ArgumentError("per-call time of '" + primitive + "' must be > 0 at " + describe(key));
  }
  if (cost.energy && !(*cost.energy > 0)) {
    throw ArgumentError("per-call energy of '" + primitive + "' must be > 0 at " + describe(key));
  }
  entries_[key][primitive] = cost;
}

const PrimitiveCost* PrimitiveCostTable::find(const CostKey& key,
                                              const std::string& primitive) const {
  const auto k = entries_.find(key);
  if (k == entries_.end()) return nullptr;
  const auto p = k->second.find(primitive);
  return p == k->second.end() ? nullptr : &p->second;
}

std::vector<CostKey> PrimitiveCostTable::keys() const {
  std::vector<CostKey> out;
  for (const auto& [key, _] : entries_) out.push_back(key);
  return out;
}

std::vector<std::string> PrimitiveCostTable::primitives(const CostKey& key) const {
  std::vector<std::string> out;
  const auto k = entries_.find(key);
  if (k == entries_.end()) return out;
  for (const auto& [name, _] : k->second) out.push_back(name);
  return out;
}

PrimitiveCostTable PrimitiveCostTable::from_metrics(std::span<const DenoisedMetrics> rows,
                                                    const Registry& registry) {
  PrimitiveCostTable table;
  for (const auto& row : rows) {
    if (!registry.is_primitive(row.benchmark)) continue;
    if (!row.per_call_time || !(*row.per_call_time > 0)) continue;
    PrimitiveCost cost{*row.per_call_time, std::nullopt};
    if (row.per_call_energy && *row.per_call_energy > 0) cost.energy = row.per_call_energy;
    table.set({row.config, row.thread_count}, row.benchmark, cost);
  }
  return table;
}

Prediction predict(const OpCountManifest& manifest, const PrimitiveCostTable& table,
                   const CostKey& key) {
  Prediction p;
  p.benchmark = manifest.benchmark;
  p.key = key;
  bool energy_complete = true;
  double energy = 0.0;
  for (const auto& [primitive, count] : manifest.counts) {
    if (count == 0) continue;
    const auto* cost = table.find(key, primitive);
    if (cost == nullptr) {
      throw CoverageError("no cost for primitive '" + primitive + "' at " + describe(key) +
                          " (needed by '" + manifest.benchmark + "')");
    }
    Contribution c;
    c.primitive = primitive;
    c.count = count;
    c.time = static_cast<double>(count) * cost->time;
    p.total_time += c.time;
    if (cost->energy) {
      c.energy = static_cast<double>(count) * *cost->energy;
      energy += *c.energy;
    } else {
      energy_complete = false;
    }
    p.contributions.push_back(std::move(c));
  }
  if (energy_complete) p.total_energy = energy;
  for (auto& c : p.contributions) {
    if (p.total_time > 0) c.time_share = c.time / p.total_time;
    if (p.total_energy && *p.total_energy > 0 && c.energy) {
      c.energy_share = *c.energy / *p.total_energy;
    }
  }
  return p;
}

std::vector<BreakdownEntry> breakdown(const Prediction& prediction, int decimals) {
  if (!(prediction.total_time > 0)) {
    throw ArgumentError("breakdown of '" + prediction.benchmark + "' needs a nonzero prediction");
  }
  if (decimals < 0 || decimals > 12) throw ArgumentError("decimals must lie in [0, 12]");
  std::vector<Contribution> sorted = prediction.contributions;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Contribution& a, const Contribution& b) {
    return a.time_share > b.time_share;
  });
  std::vector<double> time_shares;
  std::vector<double> energy_shares;
  bool has_energy = prediction.total_energy && *prediction.total_energy > 0;
  for (const auto& c : sorted) {
    time_shares.push_back(c.time_share);
    energy_shares.push_back(c.energy_share.value_or(0.0));
  }
  const auto time_rounded = apportion(time_shares, decimals);
  const auto energy_rounded = has_energy ? apportion(energy_shares, decimals) : std::vector<double>{};
  std::vector<BreakdownEntry> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    BreakdownEntry e{sorted[i].primitive, time_rounded[i], std::nullopt};
    if (has_energy) e.energy_share = energy_rounded[i];
    out.push_back(std::move(e));
  }
  return out;
}

PredictionError validate(const Prediction& prediction, const DenoisedMetrics& measured) {
  if (!(measured.roi_time > 0)) {
    throw ArgumentError("measured ROI time of '" + measured.benchmark + "' is zero");
  }
  PredictionError e;
  e.time = prediction.total_time / measured.roi_time - 1.0;
  if (prediction.total_energy && measured.roi_energy && *measured.roi_energy > 0) {
    e.energy = *prediction.total_energy / *measured.roi_energy - 1.0;
  }
  return e;
}

double aggregate_geomean(std::span<const double> errors) {
  if (errors.empty()) throw ArgumentError("geomean of an empty error list");
  double log_sum = 0.0;
  for (const double e : errors) {
    if (!(1.0 + e > 0)) {
      throw ArgumentError("error " + std::to_string(e) + " implies a nonpositive prediction");
    }
    log_sum += std::log1p(e);
  }
  return std::expm1(log_sum / static_cast<double>(errors.size()));
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ArgumentError("cosine of vectors of lengths " + std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
  }
  const double dot = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
  const double na2 = std::inner_product(a.begin(), a.end(), a.begin(), 0.0);
  const double nb2 = std::inner_product(b.begin(), b.end(), b.begin(), 0.0);
  if (na2 == 0 || nb2 == 0) throw ArgumentError("cosine of a zero vector");
  // sqrt(x * x) == x exactly, so identical vectors give exactly 1.
  return std::clamp(dot / std::sqrt(na2 * nb2), -1.0, 1.0);
}

std::vector<double> contribution_vector(const Prediction& prediction,
                                        const std::vector<std::string>& order) {
  std::vector<double> out;
  out.reserve(order.size());
  for (const auto& name : order) {
    const auto it = std::find_if(prediction.contributions.begin(), prediction.contributions.end(),
                                 [&](const Contribution& c) { return c.primitive == name; });
    out.push_back(it == prediction.contributions.end() ? 0.0 : it->time_share);
  }
  return out;
}

AlgorithmComparison compare_algorithms(const OpCountManifest& a, const OpCountManifest& b,
                                       const PrimitiveCostTable& table, const CostKey& key_a,
                                       const CostKey& key_b) {
  AlgorithmComparison out;
  out.key_a = key_a;
  out.key_b = key_b;
  out.prediction_a = predict(a, table, key_a);
  out.prediction_b = predict(b, table, key_b);
  if (!(out.prediction_a.total_time > 0) || !(out.prediction_b.total_time > 0)) {
    throw ArgumentError("comparison needs nonzero predictions for both manifests");
  }
  out.speedup = out.prediction_a.total_time / out.prediction_b.total_time;
  const auto& ea = out.prediction_a.total_energy;
  const auto& eb = out.prediction_b.total_energy;
  if (ea && eb && *ea > 0 && *eb > 0) out.energy_reduction = *ea / *eb;
  return out;
}

AlgorithmComparison compare_algorithms(const OpCountManifest& a, const OpCountManifest& b,
                                       const PrimitiveCostTable& table, const CostKey& key) {
  return compare_algorithms(a, b, table, key, key);
}

ValidationReport summarize_validation(std::vector<BenchmarkValidation> rows) {
  ValidationReport report;
  std::map<std::string, std::vector<double>> time_errors;
  std::map<std::string, std::vector<double>> energy_errors;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> times;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> energies;
  for (const auto& r : rows) {
    const auto level = to_string(r.level);
    time_errors[level].push_back(r.error.time);
    times[r.benchmark].first.push_back(r.predicted_time);
    times[r.benchmark].second.push_back(r.measured_time);
    if (r.error.energy) {
      energy_errors[level].push_back(*r.error.energy);
      energies[r.benchmark].first.push_back(*r.predicted_energy);
      energies[r.benchmark].second.push_back(*r.measured_energy);
    }
  }
  for (const auto& [level, errors] : time_errors) report.time_geomean[level] = aggregate_geomean(errors);
  for (const auto& [level, errors] : energy_errors) {
    report.energy_geomean[level] = aggregate_geomean(errors);
  }
  for (const auto& [name, v] : times) report.time_cosine[name] = cosine_similarity(v.first, v.second);
  for (const auto& [name, v] : energies) {
    report.energy_cosine[name] = cosine_similarity(v.first, v.second);
  }
  report.rows = std::move(rows);
  return report;
}

}  // namespace fheprof
