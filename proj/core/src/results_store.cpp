// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/results_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <iterator>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "fheprof/errors.hpp"

namespace fheprof {

namespace {

const std::vector<std::string>& canonical_columns(RowKind kind) {
  static const std::vector<std::string> common{"kind",        "schema_version",    "benchmark",
                                               "log2_ring_dim", "depth",           "batch_size",
                                               "security_standard", "threads"};
  static const std::map<RowKind, std::vector<std::string>> extra{
      {RowKind::Measurement,
       {"phase", "pass", "run_index", "wall_time", "total_wall_time", "energy", "events",
        "repetitions", "exit_status", "timestamp"}},
      {RowKind::Denoised,
       {"denoised", "roi_time", "roi_energy", "avg_power", "ipc", "roi_events", "calls",
        "per_call_time", "per_call_energy", "per_call_events", "full_time", "setup_time",
        "warnings"}},
      {RowKind::Prediction, {"total_time", "total_energy", "contributions", "prediction_seconds"}},
      {RowKind::Validation,
       {"level", "predicted_time", "measured_time", "time_error", "predicted_energy",
        "measured_energy", "energy_error"}},
      {RowKind::Failure, {"phase", "pass", "run_index", "group_index", "exit_status", "reason"}},
  };
  static const std::map<RowKind, std::vector<std::string>> all = [] {
    std::map<RowKind, std::vector<std::string>> out;
    for (const auto& [k, cols] : extra) {
      auto v = common;
      v.insert(v.end(), cols.begin(), cols.end());
      out[k] = v;
    }
    return out;
  }();
  return all.at(kind);
}

std::string encode_counts(const std::map<std::string, double>& counts) {
  std::string out;
  for (const auto& [name, value] : counts) {
    if (!out.empty()) out += ';';
    out += name + "=" + format_double(value);
  }
  return out;
}

std::map<std::string, double> decode_counts(std::string_view text) {
  std::map<std::string, double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto item = text.substr(pos, end - pos);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw SchemaError("malformed count entry '" + std::string(item) + "'");
    out[std::string(item.substr(0, eq))] = parse_double(item.substr(eq + 1));
    pos = end + 1;
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_manifest_file(const std::filesystem::path& dir) {
  const auto path = dir / "store.json";
  const auto text = read_file(path);
  if (text.empty()) return;
  int version = 0;
  try {
    version = nlohmann::json::parse(text).at("schema_version").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  if (version != kStoreSchemaVersion) throw MigrationError(version, kStoreSchemaVersion);
}

std::vector<ResultRow> read_kind(const std::filesystem::path& dir, RowKind kind,
                                 const RowFilter& filter) {
  const auto path = ResultsStore::file_for(dir, kind);
  const auto text = read_file(path);
  std::vector<ResultRow> out;
  if (text.empty()) return out;
  const auto records = parse_csv(text);
  if (records.empty()) return out;
  const auto& header = records.front();
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) {
      throw SchemaError(path.string() + ": record " + std::to_string(r) + " has " +
                        std::to_string(rec.size()) + " fields, header has " +
                        std::to_string(header.size()));
    }
    ResultRow row;
    row.kind = kind;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == "kind") {
        if (parse_row_kind(rec[c]) != kind) throw SchemaError(path.string() + ": foreign row kind");
      } else if (header[c] == "schema_version") {
        const int v = static_cast<int>(parse_double(rec[c]));
        if (v != kStoreSchemaVersion) throw MigrationError(v, kStoreSchemaVersion);
        row.schema_version = v;
      } else if (!rec[c].empty()) {
        row.fields[header[c]] = rec[c];
      }
    }
    if (filter.matches(row)) out.push_back(std::move(row));
  }
  return out;
}

void write_all(const std::filesystem::path& path, const std::string& text, bool append) {
  std::ofstream out(path, append ? std::ios::binary | std::ios::app : std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

std::vector<std::string> row_record(const ResultRow& row, const std::vector<std::string>& header) {
  std::vector<std::string> rec;
  rec.reserve(header.size());
  for (const auto& col : header) {
    if (col == "kind") {
      rec.push_back(to_string(row.kind));
    } else if (col == "schema_version") {
      rec.push_back(std::to_string(row.schema_version));
    } else {
      const auto it = row.fields.find(col);
      rec.push_back(it == row.fields.end() ? std::string() : it->second);
    }
  }
  return rec;
}

}  // namespace

std::string to_string(RowKind kind) {
  switch (kind) {
    case RowKind::Measurement: return "measurement";
    case RowKind::Denoised: return "denoised";
    case RowKind::Prediction: return "prediction";
    case RowKind::Validation: return "validation";
    case RowKind::Failure: return "failure";
  }
  return "measurement";
}

RowKind parse_row_kind(std::string_view text) {
  for (const auto k : {RowKind::Measurement, RowKind::Denoised, RowKind::Prediction,
                       RowKind::Validation, RowKind::Failure}) {
    if (to_string(k) == text) return k;
  }
  throw ArgumentError("unknown row kind '" + std::string(text) + "'");
}

bool ResultRow::has(const std::string& column) const { return fields.contains(column); }

const std::string& ResultRow::at(const std::string& column) const {
  const auto it = fields.find(column);
  if (it == fields.end()) throw SchemaError("row lacks column '" + column + "'");
  return it->second;
}

std::optional<double> ResultRow::number(const std::string& column) const {
  const auto it = fields.find(column);
  if (it == fields.end()) return std::nullopt;
  return parse_double(it->second);
}

void ResultRow::set(const std::string& column, double value) { fields[column] = format_double(value); }

void ResultRow::set(const std::string& column, const std::optional<double>& value) {
  if (value) {
    set(column, *value);
  } else {
    fields.erase(column);
  }
}

void ResultRow::set_int(const std::string& column, long long value) {
  fields[column] = std::to_string(value);
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw SchemaError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::string format_timestamp(std::chrono::system_clock::time_point t) {
  const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t.time_since_epoch()).count();
  auto secs = static_cast<std::time_t>(ns / 1'000'000'000);
  auto frac = ns % 1'000'000'000;
  if (frac < 0) {
    frac += 1'000'000'000;
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%09lldZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<long long>(frac));
  return buf;
}

std::chrono::system_clock::time_point parse_timestamp(std::string_view text) {
  std::tm tm{};
  long long frac = 0;
  const std::string s(text);
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%9lldZ", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                  &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &frac) != 7) {
    throw SchemaError("malformed timestamp '" + s + "'");
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  const auto secs = timegm(&tm);
  return std::chrono::system_clock::time_point(
      std::chrono::duration_cast<std::chrono::system_clock::duration>(
          std::chrono::seconds(secs) + std::chrono::nanoseconds(frac)));
}

void put_config(ResultRow& row, const CryptoConfig& config, int threads) {
  row.set_int("log2_ring_dim", config.log2_ring_dim);
  row.set_int("depth", config.depth);
  row.set("batch_size", std::to_string(config.batch_size));
  row.set("security_standard", to_string(config.security_standard));
  row.set_int("threads", threads);
}

CryptoConfig get_config(const ResultRow& row) {
  CryptoConfig c;
  c.log2_ring_dim = std::stoi(row.at("log2_ring_dim"));
  c.depth = std::stoi(row.at("depth"));
  c.batch_size = std::stoull(row.at("batch_size"));
  c.security_standard = parse_security_standard(row.at("security_standard"));
  return c;
}

int get_threads(const ResultRow& row) { return std::stoi(row.at("threads")); }

ResultRow to_row(const MeasurementRecord& r) {
  ResultRow row;
  row.kind = RowKind::Measurement;
  row.set("benchmark", r.benchmark);
  put_config(row, r.config, r.thread_count);
  row.set("phase", to_string(r.phase));
  row.set("pass", to_string(r.pass));
  row.set_int("run_index", r.run_index);
  row.set("wall_time", r.wall_time);
  row.set("total_wall_time", r.total_wall_time);
  row.set("energy", r.energy);
  if (!r.event_counts.empty()) row.set("events", encode_counts(r.event_counts));
  row.set("repetitions", std::to_string(r.repetitions));
  row.set_int("exit_status", r.exit_status);
  row.set("timestamp", format_timestamp(r.timestamp));
  return row;
}

MeasurementRecord measurement_from_row(const ResultRow& row) {
  MeasurementRecord r;
  r.benchmark = row.at("benchmark");
  r.config = get_config(row);
  r.thread_count = get_threads(row);
  r.phase = parse_run_phase(row.at("phase"));
  r.pass = parse_measurement_pass(row.at("pass"));
  r.run_index = std::stoi(row.at("run_index"));
  r.wall_time = parse_double(row.at("wall_time"));
  r.total_wall_time = row.number("total_wall_time").value_or(r.wall_time);
  r.energy = row.number("energy");
  if (row.has("events")) r.event_counts = decode_counts(row.at("events"));
  if (row.has("repetitions")) r.repetitions = std::stoull(row.at("repetitions"));
  if (row.has("exit_status")) r.exit_status = std::stoi(row.at("exit_status"));
  if (row.has("timestamp")) r.timestamp = parse_timestamp(row.at("timestamp"));
  return r;
}

ResultRow to_row(const DenoisedMetrics& m) {
  ResultRow row;
  row.kind = RowKind::Denoised;
  row.set("benchmark", m.benchmark);
  put_config(row, m.config, m.thread_count);
  row.set("denoised", "true");
  row.set("roi_time", m.roi_time);
  row.set("roi_energy", m.roi_energy);
  row.set("avg_power", m.avg_power);
  row.set("ipc", m.ipc);
  if (!m.roi_events.empty()) row.set("roi_events", encode_counts(m.roi_events));
  row.set("calls", std::to_string(m.calls));
  row.set("per_call_time", m.per_call_time);
  row.set("per_call_energy", m.per_call_energy);
  if (!m.per_call_events.empty()) row.set("per_call_events", encode_counts(m.per_call_events));
  row.set("full_time", m.full_time);
  row.set("setup_time", m.setup_time);
  if (!m.warnings.empty()) row.set("warnings", nlohmann::json(m.warnings).dump());
  return row;
}

DenoisedMetrics denoised_from_row(const ResultRow& row) {
  DenoisedMetrics m;
  m.benchmark = row.at("benchmark");
  m.config = get_config(row);
  m.thread_count = get_threads(row);
  m.roi_time = parse_double(row.at("roi_time"));
  m.roi_energy = row.number("roi_energy");
  m.avg_power = row.number("avg_power");
  m.ipc = row.number("ipc");
  if (row.has("roi_events")) m.roi_events = decode_counts(row.at("roi_events"));
  if (row.has("calls")) m.calls = std::stoull(row.at("calls"));
  m.per_call_time = row.number("per_call_time");
  m.per_call_energy = row.number("per_call_energy");
  if (row.has("per_call_events")) m.per_call_events = decode_counts(row.at("per_call_events"));
  m.full_time = row.number("full_time").value_or(0.0);
  m.setup_time = row.number("setup_time").value_or(0.0);
  if (row.has("warnings")) {
    try {
      m.warnings = nlohmann::json::parse(row.at("warnings")).get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("warnings column: ") + e.what());
    }
  }
  return m;
}

ResultRow to_row(const Prediction& p, double prediction_seconds) {
  ResultRow row;
  row.kind = RowKind::Prediction;
  row.set("benchmark", p.benchmark);
  put_config(row, p.key.config, p.key.thread_count);
  row.set("total_time", p.total_time);
  row.set("total_energy", p.total_energy);
  std::map<std::string, double> shares;
  for (const auto& c : p.contributions) shares[c.primitive] = c.time_share;
  if (!shares.empty()) row.set("contributions", encode_counts(shares));
  row.set("prediction_seconds", prediction_seconds);
  return row;
}

ResultRow to_row(const BenchmarkValidation& v) {
  ResultRow row;
  row.kind = RowKind::Validation;
  row.set("benchmark", v.benchmark);
  put_config(row, v.key.config, v.key.thread_count);
  row.set("level", to_string(v.level));
  row.set("predicted_time", v.predicted_time);
  row.set("measured_time", v.measured_time);
  row.set("time_error", v.error.time);
  row.set("predicted_energy", v.predicted_energy);
  row.set("measured_energy", v.measured_energy);
  row.set("energy_error", v.error.energy);
  return row;
}

ResultRow failure_row(const RunnerInvocation& inv, MeasurementPass pass, const RunFailure& f) {
  ResultRow row;
  row.kind = RowKind::Failure;
  row.set("benchmark", inv.benchmark);
  put_config(row, inv.config, inv.thread_count);
  row.set("phase", to_string(inv.phase));
  row.set("pass", to_string(pass));
  row.set_int("run_index", f.run_index);
  row.set_int("group_index", static_cast<long long>(f.group_index));
  row.set_int("exit_status", f.exit_status);
  row.set("reason", f.reason);
  return row;
}

bool RowFilter::matches(const ResultRow& row) const {
  if (kind && row.kind != *kind) return false;
  if (benchmark) {
    const auto it = row.fields.find("benchmark");
    if (it == row.fields.end() || it->second != *benchmark) return false;
  }
  if (config) {
    try {
      if (get_config(row) != *config) return false;
    } catch (const std::exception&) {
      return false;
    }
  }
  if (thread_count) {
    const auto it = row.fields.find("threads");
    if (it == row.fields.end() || it->second != std::to_string(*thread_count)) return false;
  }
  return true;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw ParseError("quote inside unquoted field", i);
        quoted = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        record.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(record));
        record.clear();
        field_started = false;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", text.size());
  if (field_started || !field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

std::string format_csv_record(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    const auto& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out += f;
      continue;
    }
    out += '"';
    for (const char c : f) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  }
  out += '\n';
  return out;
}

std::filesystem::path ResultsStore::file_for(const std::filesystem::path& dir, RowKind kind) {
  return dir / (to_string(kind) + ".csv");
}

ResultsStore ResultsStore::open(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create store " + dir.string() + ": " + ec.message());
  const auto lock_path = dir / ".lock";
  const int fd = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError("cannot open " + lock_path.string() + ": " + std::strerror(errno));
  if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd);
    throw LockError("results store " + dir.string() + " is held by another writer");
  }
  ResultsStore store(dir, fd);
  check_manifest_file(dir);
  if (!std::filesystem::exists(dir / "store.json")) {
    write_all(dir / "store.json",
              nlohmann::json{{"schema_version", kStoreSchemaVersion}}.dump(2) + "\n", false);
  }
  return store;
}

std::vector<ResultRow> ResultsStore::read(const std::filesystem::path& dir,
                                          const RowFilter& filter) {
  std::vector<ResultRow> out;
  if (!std::filesystem::is_directory(dir)) return out;
  check_manifest_file(dir);
  for (const auto kind : {RowKind::Measurement, RowKind::Denoised, RowKind::Prediction,
                          RowKind::Validation, RowKind::Failure}) {
    if (filter.kind && *filter.kind != kind) continue;
    auto rows = read_kind(dir, kind, filter);
    std::move(rows.begin(), rows.end(), std::back_inserter(out));
  }
  return out;
}

ResultsStore::ResultsStore(ResultsStore&& other) noexcept
    : dir_(std::move(other.dir_)), lock_fd_(std::exchange(other.lock_fd_, -1)) {}

ResultsStore& ResultsStore::operator=(ResultsStore&& other) noexcept {
  if (this != &other) {
    if (lock_fd_ >= 0) ::close(lock_fd_);
    dir_ = std::move(other.dir_);
    lock_fd_ = std::exchange(other.lock_fd_, -1);
  }
  return *this;
}

ResultsStore::~ResultsStore() {
  if (lock_fd_ >= 0) ::close(lock_fd_);
}

void ResultsStore::persist(const std::vector<ResultRow>& rows) {
  std::map<RowKind, std::vector<const ResultRow*>> by_kind;
  for (const auto& r : rows) {
    if (r.schema_version != kStoreSchemaVersion) {
      throw MigrationError(r.schema_version, kStoreSchemaVersion);
    }
    by_kind[r.kind].push_back(&r);
  }
  for (const auto& [kind, kind_rows] : by_kind) {
    const auto path = file_for(dir_, kind);
    const auto existing_text = read_file(path);
    auto records = existing_text.empty() ? std::vector<std::vector<std::string>>{}
                                         : parse_csv(existing_text);
    std::vector<std::string> header =
        records.empty() ? canonical_columns(kind) : records.front();
    std::set<std::string> known(header.begin(), header.end());
    std::set<std::string> extra;
    for (const auto* r : kind_rows) {
      for (const auto& [col, _] : r->fields) {
        if (!known.contains(col)) extra.insert(col);
      }
    }
    std::string text;
    if (records.empty() || !extra.empty()) {
      // Header changes: rewrite the file with the widened header.
      header.insert(header.end(), extra.begin(), extra.end());
      text += format_csv_record(header);
      for (std::size_t i = 1; i < records.size(); ++i) {
        auto rec = records[i];
        rec.resize(header.size());
        text += format_csv_record(rec);
      }
      for (const auto* r : kind_rows) text += format_csv_record(row_record(*r, header));
      const auto tmp = path.string() + ".tmp";
      write_all(tmp, text, false);
      std::filesystem::rename(tmp, path);
    } else {
      for (const auto* r : kind_rows) text += format_csv_record(row_record(*r, header));
      write_all(path, text, true);
    }
  }
}

std::vector<ResultRow> ResultsStore::load(const RowFilter& filter) const {
  return read(dir_, filter);
}

}  // namespace fheprof
