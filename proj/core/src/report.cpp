// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/report.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <tuple>

#include <fmt/core.h>

#include "fheprof/errors.hpp"
#include "fheprof/perf_model.hpp"

namespace fheprof {

namespace {

std::size_t display_width(std::string_view s) {
  std::size_t n = 0;
  for (const unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

bool numeric_cell(std::string_view s) {
  if (s.empty() || s == "n/a" || s == "-") return true;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  return i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) != 0);
}

using PointKey = std::tuple<std::string, CryptoConfig, int>;

PointKey key_of(const ResultRow& row) {
  return {row.at("benchmark"), get_config(row), get_threads(row)};
}

std::string label(const PointKey& key) {
  return describe(std::get<1>(key)) + " t=" + std::to_string(std::get<2>(key));
}

// Aggregate (run_index -1) measurement rows by point, phase and pass.
std::map<std::tuple<PointKey, std::string, std::string>, const ResultRow*> aggregates(
    const std::vector<ResultRow>& rows) {
  std::map<std::tuple<PointKey, std::string, std::string>, const ResultRow*> out;
  for (const auto& r : rows) {
    if (r.kind != RowKind::Measurement || !r.has("run_index") || r.at("run_index") != "-1") {
      continue;
    }
    out[{key_of(r), r.at("phase"), r.at("pass")}] = &r;
  }
  return out;
}

std::string fixed(double v, int decimals) { return fmt::format("{:.{}f}", v, decimals); }

std::string percent(double fraction, int decimals) { return fixed(fraction * 100.0, decimals) + "%"; }

Report overhead_report(const std::vector<ResultRow>& rows) {
  Report report{ReportKind::Overhead, {}, {}};
  const auto agg = aggregates(rows);
  std::vector<std::vector<std::string>> body;
  for (const auto& r : rows) {
    if (r.kind != RowKind::Denoised) continue;
    const auto key = key_of(r);
    const double roi = parse_double(r.at("roi_time"));
    const auto setup = r.number("setup_time");
    std::string runtime_cell = "n/a";
    std::string event_cell = "n/a";
    if (roi <= 0) {
      report.gaps.push_back(std::get<0>(key) + " " + label(key) + ": zero ROI, overhead undefined");
    } else {
      if (setup) {
        runtime_cell = format_overhead(*setup, *setup / roi);
      } else {
        report.gaps.push_back(std::get<0>(key) + " " + label(key) + ": no setup time");
      }
      const auto ev = agg.find({key, "full", "events"});
      const auto rt = agg.find({key, "full", "runtime"});
      if (ev != agg.end() && rt != agg.end()) {
        const double extra = std::max(0.0, parse_double(ev->second->at("total_wall_time")) -
                                               parse_double(rt->second->at("wall_time")));
        event_cell = format_overhead(extra, extra / roi, 1);
      }
    }
    body.push_back({std::get<0>(key), label(key), fixed(roi, 2), runtime_cell, event_cell});
  }
  if (body.empty()) {
    report.gaps.emplace_back("no denoised rows in the store");
    return report;
  }
  report.text = format_table(
      {"Name", "Point", "ROI (s)", "Runtime analysis (Δ%)", "Event profiling (Δ%)"}, body);
  return report;
}

Report prediction_report(const std::vector<ResultRow>& rows) {
  Report report{ReportKind::Prediction, {}, {}};
  const auto agg = aggregates(rows);
  std::map<PointKey, const ResultRow*> predictions;
  for (const auto& r : rows) {
    if (r.kind == RowKind::Prediction && r.has("prediction_seconds")) predictions[key_of(r)] = &r;
  }
  std::vector<std::vector<std::string>> body;
  for (const auto& [key, row] : predictions) {
    const double prediction = parse_double(row->at("prediction_seconds"));
    const auto rt = agg.find({key, "full", "runtime"});
    if (rt == agg.end()) {
      report.gaps.push_back(std::get<0>(key) + " " + label(key) +
                            ": no runtime-analysis measurement to compare against");
      continue;
    }
    if (!(prediction > 0)) {
      report.gaps.push_back(std::get<0>(key) + " " + label(key) + ": prediction time is zero");
      continue;
    }
    const double profiling = parse_double(rt->second->at("wall_time"));
    body.push_back({std::get<0>(key), label(key), fmt::format("{:.4g}", profiling),
                    fmt::format("{:.4g}", prediction), format_speedup(profiling, prediction)});
  }
  if (predictions.empty()) report.gaps.emplace_back("no prediction rows in the store");
  if (!body.empty()) {
    report.text = format_table({"Name", "Point", "Profiling (s)", "Prediction (s)", "Speedup"}, body);
  }
  return report;
}

Report series_report(const std::vector<ResultRow>& rows) {
  Report report{ReportKind::Series, {}, {}};
  std::vector<std::tuple<std::string, CryptoConfig, int, const ResultRow*>> points;
  for (const auto& r : rows) {
    if (r.kind != RowKind::Denoised || !r.has("per_call_time")) continue;
    points.emplace_back(r.at("benchmark"), get_config(r), get_threads(r), &r);
  }
  if (points.empty()) {
    report.gaps.emplace_back("no per-call primitive rows in the store");
    return report;
  }
  std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a), std::get<2>(a)) <
           std::tie(std::get<0>(b), std::get<1>(b), std::get<2>(b));
  });
  std::string text =
      format_csv_record({"primitive", "log2_ring_dim", "depth", "batch_size", "security_standard",
                         "threads", "per_call_time", "per_call_energy"});
  for (const auto& [name, config, threads, row] : points) {
    text += format_csv_record({name, std::to_string(config.log2_ring_dim),
                               std::to_string(config.depth), std::to_string(config.batch_size),
                               to_string(config.security_standard), std::to_string(threads),
                               row->at("per_call_time"),
                               row->has("per_call_energy") ? row->at("per_call_energy") : ""});
  }
  report.text = std::move(text);
  return report;
}

Report validation_report(const std::vector<ResultRow>& rows) {
  Report report{ReportKind::Validation, {}, {}};
  std::vector<BenchmarkValidation> vals;
  std::vector<std::vector<std::string>> body;
  for (const auto& r : rows) {
    if (r.kind != RowKind::Validation) continue;
    BenchmarkValidation v;
    v.benchmark = r.at("benchmark");
    v.level = parse_abstraction_level(r.at("level"));
    v.key = {get_config(r), get_threads(r)};
    v.predicted_time = parse_double(r.at("predicted_time"));
    v.measured_time = parse_double(r.at("measured_time"));
    v.error.time = parse_double(r.at("time_error"));
    v.predicted_energy = r.number("predicted_energy");
    v.measured_energy = r.number("measured_energy");
    v.error.energy = r.number("energy_error");
    body.push_back({v.benchmark, describe(v.key), fmt::format("{:.4g}", v.predicted_time),
                    fmt::format("{:.4g}", v.measured_time), percent(v.error.time, 2),
                    v.error.energy ? percent(*v.error.energy, 2) : "n/a"});
    vals.push_back(std::move(v));
  }
  if (vals.empty()) {
    report.gaps.emplace_back("no validation rows in the store");
    return report;
  }
  const auto summary = summarize_validation(std::move(vals));
  report.text = format_table({"Name", "Point", "Predicted (s)", "Measured (s)", "Time error",
                              "Energy error"},
                             body);
  report.text += "\nsigned geomean error = (prod(predicted/measured))^(1/n) - 1\n";
  std::vector<std::vector<std::string>> geo;
  for (const auto& [level, g] : summary.time_geomean) {
    const auto e = summary.energy_geomean.find(level);
    geo.push_back({level, percent(g, 2),
                   e == summary.energy_geomean.end() ? "n/a" : percent(e->second, 2)});
  }
  report.text += format_table({"Level", "Time geomean", "Energy geomean"}, geo);
  report.text += "\ncosine of predicted vs measured totals over all thread counts\n";
  std::vector<std::vector<std::string>> cos;
  for (const auto& [name, c] : summary.time_cosine) {
    const auto e = summary.energy_cosine.find(name);
    cos.push_back({name, fixed(c, 4), e == summary.energy_cosine.end() ? "n/a" : fixed(e->second, 4)});
  }
  report.text += format_table({"Name", "Time cosine", "Energy cosine"}, cos);
  return report;
}

}  // namespace

std::string to_string(ReportKind kind) {
  switch (kind) {
    case ReportKind::Overhead: return "overhead";
    case ReportKind::Prediction: return "prediction";
    case ReportKind::Series: return "series";
    case ReportKind::Validation: return "validation";
  }
  return "overhead";
}

ReportKind parse_report_kind(std::string_view text) {
  for (const auto k :
       {ReportKind::Overhead, ReportKind::Prediction, ReportKind::Series, ReportKind::Validation}) {
    if (to_string(k) == text) return k;
  }
  throw ArgumentError("unknown report kind '" + std::string(text) +
                      "' (overhead, prediction, series, validation)");
}

std::string format_overhead(double seconds, double fraction, int percent_decimals) {
  return fixed(seconds, 2) + " (" + percent(fraction, percent_decimals) + ")";
}

std::string format_speedup(double profiling_seconds, double prediction_seconds) {
  if (!(prediction_seconds > 0)) throw ArgumentError("prediction time must be > 0");
  return fixed(profiling_seconds / prediction_seconds, 1) + "×";
}

Report make_report(const std::vector<ResultRow>& rows, ReportKind kind) {
  switch (kind) {
    case ReportKind::Overhead: return overhead_report(rows);
    case ReportKind::Prediction: return prediction_report(rows);
    case ReportKind::Series: return series_report(rows);
    case ReportKind::Validation: return validation_report(rows);
  }
  return overhead_report(rows);
}

std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& body) {
  if (header.empty()) return {};
  std::vector<std::size_t> widths(header.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size() && i < widths.size(); ++i) {
      widths[i] = std::max(widths[i], display_width(row[i]));
    }
  };
  widen(header);
  for (const auto& row : body) widen(row);
  std::vector<bool> right(widths.size(), true);
  right[0] = false;
  for (const auto& row : body) {
    for (std::size_t i = 1; i < row.size() && i < right.size(); ++i) {
      if (!numeric_cell(row[i])) right[i] = false;
    }
  }
  auto line = [&](const std::vector<std::string>& row) {
    std::string out;
    for (std::size_t i = 0; i < widths.size(); ++i) {
      const std::string cell = i < row.size() ? row[i] : "";
      const std::string pad(widths[i] - display_width(cell), ' ');
      if (i > 0) out += "  ";
      out += right[i] ? pad + cell : cell + pad;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (const auto w : widths) total += w;
  out += std::string(total + 2 * (widths.size() - 1), '-') + "\n";
  for (const auto& row : body) out += line(row);
  return out;
}

}  // namespace fheprof
