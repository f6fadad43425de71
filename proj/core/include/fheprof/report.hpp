// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fheprof/results_store.hpp"

namespace fheprof {

enum class ReportKind { Overhead, Prediction, Series, Validation };

std::string to_string(ReportKind kind);
ReportKind parse_report_kind(std::string_view text);

struct Report {
  ReportKind kind = ReportKind::Overhead;
  std::string text;
  /// Inputs the report needed but the store lacks. Never filled with zeros.
  std::vector<std::string> gaps;

  bool has_gaps() const { return !gaps.empty(); }
};

/// "0.04 (0.39%)": seconds to two places, share in percent.
std::string format_overhead(double seconds, double fraction, int percent_decimals = 2);
/// "422.0×"
std::string format_speedup(double profiling_seconds, double prediction_seconds);

/// Overhead: ROI, setup cost and event-profiling cost per denoised point.
/// Prediction: runtime-analysis time against model-evaluation time.
/// Series: per-primitive per-call runtime and energy against thread count (CSV).
/// Validation: signed errors, geomeans and cosines.
Report make_report(const std::vector<ResultRow>& rows, ReportKind kind);

/// Two-space gutters. Columns holding only numbers (or n/a) after the first
/// are right-aligned; the rest are left-aligned.
std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& body);

}  // namespace fheprof
