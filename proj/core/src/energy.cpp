// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/energy.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fheprof/errors.hpp"

namespace fheprof {

namespace {

std::optional<std::string> read_line(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line)) return std::nullopt;
  return line;
}

std::optional<double> read_microjoules(const std::filesystem::path& path) {
  const auto line = read_line(path);
  if (!line) return std::nullopt;
  try {
    return static_cast<double>(std::stoull(*line)) * 1e-6;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::unique_ptr<RaplEnergyCounter> RaplEnergyCounter::open(
    const std::filesystem::path& powercap_root) {
  std::error_code ec;
  if (!std::filesystem::is_directory(powercap_root, ec)) {
    throw CapabilityError("no powercap interface at " + powercap_root.string());
  }
  std::vector<std::filesystem::path> zones;
  for (const auto& entry : std::filesystem::directory_iterator(powercap_root, ec)) {
    const auto name = entry.path().filename().string();
    // Top-level zones only ("intel-rapl:0"), not subzones ("intel-rapl:0:1").
    if (name.starts_with("intel-rapl:") && name.find(':') == name.rfind(':')) {
      zones.push_back(entry.path());
    }
  }
  std::sort(zones.begin(), zones.end());
  for (const auto& zone : zones) {
    const auto label = read_line(zone / "name");
    if (!label || !label->starts_with("package")) continue;
    const auto range = read_microjoules(zone / "max_energy_range_uj");
    if (!range || !read_microjoules(zone / "energy_uj")) continue;
    return std::unique_ptr<RaplEnergyCounter>(new RaplEnergyCounter(zone, *range));
  }
  throw CapabilityError("no readable RAPL package zone under " + powercap_root.string());
}

double RaplEnergyCounter::read_joules() {
  const auto value = read_microjoules(zone_ / "energy_uj");
  if (!value) throw CapabilityError("energy counter " + zone_.string() + " became unreadable");
  return *value;
}

double energy_delta(double before, double after, double max_range) {
  if (after >= before) return after - before;
  return after + max_range - before;
}

double read_energy_counter() { return RaplEnergyCounter::open()->read_joules(); }

}  // namespace fheprof
