// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fheprof/errors.hpp"
#include "fheprof/perf_model.hpp"

using namespace fheprof;

namespace {

const std::vector<std::string> kPrims = {"EvalAdd",    "EvalMult",   "EvalRotate", "EvalSub",
                                         "Encrypt",    "Decrypt",    "EvalNegate", "Rescale",
                                         "KeySwitch",  "EvalSquare", "Bootstrap",  "EvalAtIndex",
                                         "EvalMultPt", "EvalAddPt"};

struct Case {
  OpCountManifest manifest;
  PrimitiveCostTable table;
  CostKey key;
  std::map<std::string, std::pair<double, double>> costs;
};

Case random_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nprims(1, static_cast<int>(kPrims.size()));
  std::uniform_int_distribution<std::uint64_t> count(0, 1'000'000);
  std::uniform_real_distribution<double> log_cost(std::log(1e-7), std::log(1e-1));
  std::uniform_int_distribution<int> threads(1, 64);
  Case c;
  c.key.thread_count = threads(rng);
  c.manifest.benchmark = "random";
  auto names = kPrims;
  std::shuffle(names.begin(), names.end(), rng);
  names.resize(static_cast<std::size_t>(nprims(rng)));
  for (const auto& n : names) {
    c.manifest.counts[n] = count(rng);
    const double t = std::exp(log_cost(rng));
    const double e = std::exp(log_cost(rng)) * 30;
    c.costs[n] = {t, e};
    c.table.set(c.key, n, {t, e});
  }
  return c;
}

// Straight sum in extended precision, reverse order.
std::pair<long double, long double> brute_force(const Case& c) {
  long double t = 0, e = 0;
  for (auto it = c.manifest.counts.rbegin(); it != c.manifest.counts.rend(); ++it) {
    const auto& [t1, e1] = c.costs.at(it->first);
    t += static_cast<long double>(it->second) * t1;
    e += static_cast<long double>(it->second) * e1;
  }
  return {t, e};
}

double rel(double a, long double b) {
  if (b == 0) return std::abs(a);
  return static_cast<double>(std::abs((a - b) / b));
}

std::string argmax(const Prediction& p) {
  const auto it = std::max_element(
      p.contributions.begin(), p.contributions.end(),
      [](const Contribution& a, const Contribution& b) { return a.time < b.time; });
  return it == p.contributions.end() ? "" : it->primitive;
}

}  // namespace

TEST(Predict, MatchesBruteForceOnRandomCases) {
  std::mt19937_64 rng(20260101);
  for (int i = 0; i < 1000; ++i) {
    const auto c = random_case(rng);
    const auto p = predict(c.manifest, c.table, c.key);
    const auto [t, e] = brute_force(c);
    ASSERT_LE(rel(p.total_time, t), 1e-12) << "case " << i;
    ASSERT_TRUE(p.total_energy.has_value());
    ASSERT_LE(rel(*p.total_energy, e), 1e-12) << "case " << i;
  }
}

TEST(Predict, HomogeneousInCounts) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto c = random_case(rng);
    const std::uint64_t k = 1 + rng() % 50;
    const auto base = predict(c.manifest, c.table, c.key);
    const auto scaled = predict(c.manifest.scaled(k), c.table, c.key);
    EXPECT_LE(rel(scaled.total_time, static_cast<long double>(k) * base.total_time), 1e-12);
    EXPECT_EQ(argmax(scaled), argmax(base));
  }
}

TEST(Predict, AdditiveOverManifests) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    auto a = random_case(rng);
    auto b = random_case(rng);
    // b reuses a's costs where they overlap, and a learns b's remaining ones.
    PrimitiveCostTable table;
    CostKey key = a.key;
    std::map<std::string, std::pair<double, double>> costs = a.costs;
    for (const auto& [n, v] : b.costs) costs.emplace(n, v);
    for (const auto& [n, v] : costs) table.set(key, n, {v.first, v.second});
    const auto pa = predict(a.manifest, table, key);
    const auto pb = predict(b.manifest, table, key);
    const auto pab = predict(a.manifest.merged_with(b.manifest), table, key);
    EXPECT_LE(rel(pab.total_time, static_cast<long double>(pa.total_time) + pb.total_time), 1e-12);
    EXPECT_LE(rel(*pab.total_energy, static_cast<long double>(*pa.total_energy) + *pb.total_energy),
              1e-12);
  }
}

TEST(Predict, ArgmaxStableUnderUniformCostScaling) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> factor(0.01, 100.0);
  for (int i = 0; i < 200; ++i) {
    const auto c = random_case(rng);
    const double f = factor(rng);
    PrimitiveCostTable scaled;
    for (const auto& [n, v] : c.costs) scaled.set(c.key, n, {v.first * f, v.second * f});
    const auto p = predict(c.manifest, c.table, c.key);
    const auto q = predict(c.manifest, scaled, c.key);
    EXPECT_EQ(argmax(p), argmax(q));
    EXPECT_LE(rel(q.total_time, static_cast<long double>(p.total_time) * f), 1e-12);
    for (std::size_t j = 0; j < p.contributions.size(); ++j) {
      EXPECT_NEAR(p.contributions[j].time_share, q.contributions[j].time_share, 1e-12);
    }
  }
}

TEST(Predict, MissingCostIsCoverageError) {
  PrimitiveCostTable table;
  const CostKey key{CryptoConfig{}, 4};
  table.set(key, "EvalAdd", {1e-3, std::nullopt});
  OpCountManifest m{"x", {{"EvalAdd", 3}, {"EvalMult", 2}}};
  try {
    predict(m, table, key);
    FAIL() << "expected CoverageError";
  } catch (const CoverageError& e) {
    EXPECT_NE(std::string(e.what()).find("EvalMult"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("threads=4"), std::string::npos);
  }
  // Zero counts need no cost.
  m.counts["EvalMult"] = 0;
  const auto p = predict(m, table, key);
  EXPECT_DOUBLE_EQ(p.total_time, 3e-3);
  EXPECT_FALSE(p.total_energy.has_value());
  EXPECT_EQ(p.contributions.size(), 1u);
  // Another key is a different point.
  EXPECT_THROW(predict(m, table, CostKey{CryptoConfig{}, 8}), CoverageError);
}

TEST(CostTable, RejectsNonPositiveCosts) {
  PrimitiveCostTable t;
  EXPECT_THROW(t.set({}, "a", {0.0, std::nullopt}), ArgumentError);
  EXPECT_THROW(t.set({}, "a", {1.0, 0.0}), ArgumentError);
  EXPECT_TRUE(t.empty());
}

TEST(Breakdown, RoundedSharesSumToOne) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    auto c = random_case(rng);
    for (auto& [n, v] : c.manifest.counts) v += 1;
    const auto p = predict(c.manifest, c.table, c.key);
    for (const int d : {0, 2, 4}) {
      const auto b = breakdown(p, d);
      const double unit = std::pow(10.0, -d);
      long long t_units = 0, e_units = 0;
      for (std::size_t j = 0; j < b.size(); ++j) {
        t_units += std::llround(b[j].time_share / unit);
        e_units += std::llround(*b[j].energy_share / unit);
        if (j > 0) {
          const auto& prev = *std::find_if(p.contributions.begin(), p.contributions.end(),
                                           [&](const auto& x) { return x.primitive == b[j - 1].primitive; });
          const auto& cur = *std::find_if(p.contributions.begin(), p.contributions.end(),
                                          [&](const auto& x) { return x.primitive == b[j].primitive; });
          EXPECT_GE(prev.time_share, cur.time_share);
        }
        // Each rounded share is within one unit of the exact one.
        const auto& exact = *std::find_if(p.contributions.begin(), p.contributions.end(),
                                          [&](const auto& x) { return x.primitive == b[j].primitive; });
        EXPECT_LE(std::abs(b[j].time_share - exact.time_share), unit + 1e-12);
      }
      EXPECT_EQ(t_units, std::llround(1 / unit));
      EXPECT_EQ(e_units, std::llround(1 / unit));
    }
  }
  Prediction empty;
  EXPECT_THROW(breakdown(empty), ArgumentError);
}

TEST(Geomean, KnownValues) {
  const std::vector<double> v{0.21, 0.0};
  EXPECT_NEAR(aggregate_geomean(v), 0.10, 1e-12);
  const std::vector<double> neg{-0.19, 0.0};
  EXPECT_NEAR(aggregate_geomean(neg), -0.10, 1e-12);
  const std::vector<double> one{0.05};
  EXPECT_NEAR(aggregate_geomean(one), 0.05, 1e-15);
  EXPECT_THROW(aggregate_geomean(std::vector<double>{}), ArgumentError);
  EXPECT_THROW(aggregate_geomean(std::vector<double>{-1.0}), ArgumentError);
}

TEST(Geomean, MatchesBruteForce) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  std::uniform_int_distribution<int> len(1, 30);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> e(static_cast<std::size_t>(len(rng)));
    long double prod = 1;
    for (auto& x : e) {
      x = u(rng);
      prod *= 1.0L + x;
    }
    const long double oracle = std::pow(prod, 1.0L / e.size()) - 1.0L;
    EXPECT_NEAR(aggregate_geomean(e), static_cast<double>(oracle), 1e-12);
  }
}

TEST(Cosine, MatchesBruteForce) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-10, 10);
  std::uniform_int_distribution<int> len(1, 40);
  for (int i = 0; i < 100; ++i) {
    const auto n = static_cast<std::size_t>(len(rng));
    std::vector<double> a(n), b(n);
    long double dot = 0, na = 0, nb = 0;
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = u(rng);
      b[j] = u(rng);
      dot += static_cast<long double>(a[j]) * b[j];
      na += static_cast<long double>(a[j]) * a[j];
      nb += static_cast<long double>(b[j]) * b[j];
    }
    const long double oracle = dot / std::sqrt(na * nb);
    EXPECT_NEAR(cosine_similarity(a, b), static_cast<double>(oracle), 1e-12);
    EXPECT_EQ(cosine_similarity(a, a), 1.0);
  }
}

TEST(Cosine, Errors) {
  const std::vector<double> a{1, 2}, b{1, 2, 3}, z{0, 0};
  EXPECT_THROW(cosine_similarity(a, b), ArgumentError);
  EXPECT_THROW(cosine_similarity(a, z), ArgumentError);
  const std::vector<double> c{-1, -2};
  EXPECT_EQ(cosine_similarity(a, c), -1.0);
}

TEST(Validate, SignedError) {
  Prediction p;
  p.total_time = 1.2;
  p.total_energy = 9.0;
  DenoisedMetrics m;
  m.roi_time = 1.0;
  m.roi_energy = 10.0;
  const auto e = validate(p, m);
  EXPECT_NEAR(e.time, 0.2, 1e-15);
  EXPECT_NEAR(*e.energy, -0.1, 1e-15);
  m.roi_energy.reset();
  EXPECT_FALSE(validate(p, m).energy.has_value());
  m.roi_time = 0;
  EXPECT_THROW(validate(p, m), ArgumentError);
}

TEST(Compare, SpeedupIsRatioOfPredictions) {
  PrimitiveCostTable t;
  const CostKey k1{CryptoConfig{}, 1};
  const CostKey k8{CryptoConfig{}, 8};
  t.set(k1, "EvalMult", {4e-3, 1.0});
  t.set(k1, "EvalRotate", {2e-3, 0.5});
  t.set(k8, "EvalMult", {1e-3, 0.8});
  t.set(k8, "EvalRotate", {5e-4, 0.4});
  const OpCountManifest a{"a", {{"EvalMult", 10}}};
  const OpCountManifest b{"b", {{"EvalMult", 2}, {"EvalRotate", 4}}};
  const auto c = compare_algorithms(a, b, t, k1);
  EXPECT_NEAR(c.speedup, 0.04 / 0.016, 1e-12);
  EXPECT_NEAR(*c.energy_reduction, 10.0 / 4.0, 1e-12);
  const auto d = compare_algorithms(a, a, t, k1, k8);
  EXPECT_NEAR(d.speedup, 4.0, 1e-12);
  EXPECT_THROW(compare_algorithms(a, OpCountManifest{"z", {}}, t, k1), ArgumentError);
}

TEST(ContributionVector, ZeroForAbsent) {
  PrimitiveCostTable t;
  t.set({}, "A", {1.0, std::nullopt});
  t.set({}, "B", {3.0, std::nullopt});
  const auto p = predict(OpCountManifest{"m", {{"A", 1}, {"B", 1}}}, t, {});
  const auto v = contribution_vector(p, {"B", "C", "A"});
  ASSERT_EQ(v.size(), 3u);
  EXPECT_DOUBLE_EQ(v[0], 0.75);
  EXPECT_DOUBLE_EQ(v[1], 0.0);
  EXPECT_DOUBLE_EQ(v[2], 0.25);
}

TEST(Summarize, GeomeanPerLevelCosinePerBenchmark) {
  std::vector<BenchmarkValidation> rows;
  for (const int t : {1, 2, 4}) {
    BenchmarkValidation v;
    v.benchmark = "logreg";
    v.level = AbstractionLevel::Workload;
    v.key.thread_count = t;
    v.measured_time = 8.0 / t;
    v.predicted_time = v.measured_time * (t == 1 ? 1.21 : 1.0);
    v.error.time = v.predicted_time / v.measured_time - 1;
    rows.push_back(v);
  }
  const auto s = summarize_validation(rows);
  EXPECT_NEAR(s.time_geomean.at("workload"), std::cbrt(1.21) - 1, 1e-12);
  const std::vector<double> pred{8 * 1.21, 4, 2}, meas{8, 4, 2};
  EXPECT_NEAR(s.time_cosine.at("logreg"), cosine_similarity(pred, meas), 1e-15);
  EXPECT_TRUE(s.energy_geomean.empty());
  EXPECT_EQ(s.rows.size(), 3u);
}

TEST(FromMetrics, KeepsRegistryPrimitivesWithPositiveCost) {
  Registry reg;
  BenchmarkSpec prim;
  prim.name = "EvalAdd";
  prim.level = AbstractionLevel::Primitive;
  reg.add(prim);
  BenchmarkSpec app;
  app.name = "app";
  app.level = AbstractionLevel::Workload;
  reg.add(app);
  DenoisedMetrics a;
  a.benchmark = "EvalAdd";
  a.thread_count = 2;
  a.per_call_time = 1e-4;
  a.per_call_energy = 0.0;
  DenoisedMetrics b = a;
  b.benchmark = "app";
  DenoisedMetrics c = a;
  c.thread_count = 4;
  c.per_call_time = 0.0;
  const std::vector<DenoisedMetrics> rows{a, b, c};
  const auto t = PrimitiveCostTable::from_metrics(rows, reg);
  ASSERT_EQ(t.keys().size(), 1u);
  const auto* cost = t.find({CryptoConfig{}, 2}, "EvalAdd");
  ASSERT_NE(cost, nullptr);
  EXPECT_DOUBLE_EQ(cost->time, 1e-4);
  EXPECT_FALSE(cost->energy.has_value());
}
