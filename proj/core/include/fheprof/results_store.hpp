// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fheprof/crypto_config.hpp"
#include "fheprof/denoise.hpp"
#include "fheprof/perf_model.hpp"
#include "fheprof/profiler.hpp"

namespace fheprof {

inline constexpr int kStoreSchemaVersion = 1;

enum class RowKind { Measurement, Denoised, Prediction, Validation, Failure };

std::string to_string(RowKind kind);
RowKind parse_row_kind(std::string_view text);

/// One flat row. Column values are text; empty means absent.
struct ResultRow {
  RowKind kind = RowKind::Measurement;
  int schema_version = kStoreSchemaVersion;
  std::map<std::string, std::string> fields;

  bool has(const std::string& column) const;
  const std::string& at(const std::string& column) const;
  std::optional<double> number(const std::string& column) const;
  void set(const std::string& column, std::string value) { fields[column] = std::move(value); }
  void set(const std::string& column, double value);
  void set(const std::string& column, const std::optional<double>& value);
  void set_int(const std::string& column, long long value);

  bool operator==(const ResultRow&) const = default;
};

/// Shortest round-trip decimal form.
std::string format_double(double value);
double parse_double(std::string_view text);

std::string format_timestamp(std::chrono::system_clock::time_point t);
std::chrono::system_clock::time_point parse_timestamp(std::string_view text);

void put_config(ResultRow& row, const CryptoConfig& config, int threads);
CryptoConfig get_config(const ResultRow& row);
int get_threads(const ResultRow& row);

ResultRow to_row(const MeasurementRecord& record);
MeasurementRecord measurement_from_row(const ResultRow& row);
ResultRow to_row(const DenoisedMetrics& metrics);
DenoisedMetrics denoised_from_row(const ResultRow& row);
/// `prediction_seconds` is the model-evaluation wall time.
ResultRow to_row(const Prediction& prediction, double prediction_seconds);
ResultRow to_row(const BenchmarkValidation& validation);
ResultRow failure_row(const RunnerInvocation& invocation, MeasurementPass pass,
                      const RunFailure& failure);

struct RowFilter {
  std::optional<RowKind> kind;
  std::optional<std::string> benchmark;
  std::optional<CryptoConfig> config;
  std::optional<int> thread_count;

  bool matches(const ResultRow& row) const;
};

/// RFC 4180 records; the first record of `text` is the header.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string format_csv_record(const std::vector<std::string>& fields);

/// Directory of append-only CSV files, one per row kind, plus store.json
/// holding the schema version. Opening for writing takes an exclusive lock.
class ResultsStore {
 public:
  /// Creates the directory when needed. Throws LockError when another writer
  /// holds the store and MigrationError on a schema-version mismatch.
  static ResultsStore open(const std::filesystem::path& dir);
  /// Reads without locking; an absent store yields no rows.
  static std::vector<ResultRow> read(const std::filesystem::path& dir, const RowFilter& filter = {});

  ResultsStore(ResultsStore&& other) noexcept;
  ResultsStore& operator=(ResultsStore&& other) noexcept;
  ResultsStore(const ResultsStore&) = delete;
  ResultsStore& operator=(const ResultsStore&) = delete;
  ~ResultsStore();

  void persist(const std::vector<ResultRow>& rows);
  std::vector<ResultRow> load(const RowFilter& filter = {}) const;

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path artifacts_dir() const { return dir_ / "artifacts"; }
  static std::filesystem::path file_for(const std::filesystem::path& dir, RowKind kind);

 private:
  ResultsStore(std::filesystem::path dir, int lock_fd) : dir_(std::move(dir)), lock_fd_(lock_fd) {}

  std::filesystem::path dir_;
  int lock_fd_ = -1;
};

}  // namespace fheprof
