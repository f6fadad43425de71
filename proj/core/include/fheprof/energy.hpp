// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>

namespace fheprof {

/// Cumulative package-domain energy counter.
class EnergyCounter {
 public:
  virtual ~EnergyCounter() = default;
  /// Joules since an arbitrary origin; wraps at max_range_joules().
  virtual double read_joules() = 0;
  virtual double max_range_joules() const = 0;
};

/// RAPL package zone exposed through the Linux powercap sysfs tree.
class RaplEnergyCounter final : public EnergyCounter {
 public:
  /// Throws CapabilityError when no readable package zone exists.
  static std::unique_ptr<RaplEnergyCounter> open(
      const std::filesystem::path& powercap_root = "/sys/class/powercap");

  double read_joules() override;
  double max_range_joules() const override { return max_range_joules_; }
  const std::filesystem::path& zone() const { return zone_; }

 private:
  RaplEnergyCounter(std::filesystem::path zone, double max_range_joules)
      : zone_(std::move(zone)), max_range_joules_(max_range_joules) {}

  std::filesystem::path zone_;
  double max_range_joules_;
};

/// Energy consumed between two reads, undoing at most one wraparound.
double energy_delta(double before, double after, double max_range);

/// Reads the host's package counter once; throws CapabilityError when unsupported.
double read_energy_counter();

}  // namespace fheprof
