// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace fheprof {

enum class SecurityStandard { None, Bits128, Bits192, Bits256 };

std::string to_string(SecurityStandard standard);
/// Accepts "none", "128", "128-bit", "Bits128" and the like.
SecurityStandard parse_security_standard(std::string_view text);

/// Sweep range for the ring dimension exponent (N = 2^k).
inline constexpr int kMinLog2RingDim = 13;
inline constexpr int kMaxLog2RingDim = 17;

/// CKKS parameter set handed to a benchmark runner.
struct CryptoConfig {
  int log2_ring_dim = 16;
  int depth = 10;
  std::uint64_t batch_size = 4096;
  SecurityStandard security_standard = SecurityStandard::None;

  std::uint64_t ring_dim() const { return std::uint64_t{1} << log2_ring_dim; }

  auto operator<=>(const CryptoConfig&) const = default;
};

/// Partial configuration; unset fields keep the benchmark default.
struct ConfigOverrides {
  std::optional<int> log2_ring_dim;
  std::optional<int> depth;
  std::optional<std::uint64_t> batch_size;
  std::optional<SecurityStandard> security_standard;

  static ConfigOverrides from(const CryptoConfig& config);
  bool empty() const;
};

struct ConfigViolation {
  std::string field;
  std::string observed;
  std::string rule;
};

/// Every violated CryptoConfig invariant; empty means the config is valid.
std::vector<ConfigViolation> validate_config(const CryptoConfig& config);

std::string describe(const ConfigViolation& violation);

/// Compact human form, e.g. "N=2^16 L=10 batch=4096 sec=none".
std::string describe(const CryptoConfig& config);

/// Hex SHA-256 over the canonical serialization; keys the artifact cache.
std::string config_hash(const CryptoConfig& config);

void to_json(nlohmann::json& j, const CryptoConfig& config);
void from_json(const nlohmann::json& j, CryptoConfig& config);
void to_json(nlohmann::json& j, SecurityStandard standard);
void from_json(const nlohmann::json& j, SecurityStandard& standard);

}  // namespace fheprof
