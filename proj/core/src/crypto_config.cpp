// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/crypto_config.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>

#include <openssl/evp.h>

#include "fheprof/errors.hpp"

namespace fheprof {

std::string to_string(SecurityStandard standard) {
  switch (standard) {
    case SecurityStandard::None:
      return "none";
    case SecurityStandard::Bits128:
      return "128-bit";
    case SecurityStandard::Bits192:
      return "192-bit";
    case SecurityStandard::Bits256:
      return "256-bit";
  }
  return "none";
}

SecurityStandard parse_security_standard(std::string_view text) {
  std::string lowered;
  for (char c : text) {
    if (c != '-' && c != '_' && c != ' ') lowered.push_back(static_cast<char>(std::tolower(c)));
  }
  if (lowered.starts_with("bits")) lowered = lowered.substr(4);
  if (lowered.ends_with("bit")) lowered.resize(lowered.size() - 3);
  if (lowered == "none" || lowered.empty()) return SecurityStandard::None;
  if (lowered == "128") return SecurityStandard::Bits128;
  if (lowered == "192") return SecurityStandard::Bits192;
  if (lowered == "256") return SecurityStandard::Bits256;
  throw ArgumentError("unknown security standard '" + std::string(text) + "'");
}

ConfigOverrides ConfigOverrides::from(const CryptoConfig& config) {
  return ConfigOverrides{config.log2_ring_dim, config.depth, config.batch_size,
                         config.security_standard};
}

bool ConfigOverrides::empty() const {
  return !log2_ring_dim && !depth && !batch_size && !security_standard;
}

std::vector<ConfigViolation> validate_config(const CryptoConfig& config) {
  std::vector<ConfigViolation> out;
  const auto k = config.log2_ring_dim;
  if (k < kMinLog2RingDim) {
    out.push_back({"log2_ring_dim", std::to_string(k),
                   "below sweep floor " + std::to_string(kMinLog2RingDim)});
  } else if (k > kMaxLog2RingDim) {
    out.push_back({"log2_ring_dim", std::to_string(k),
                   "above sweep ceiling " + std::to_string(kMaxLog2RingDim)});
  }
  if (config.depth < 1) {
    out.push_back({"depth", std::to_string(config.depth), "must be >= 1"});
  }
  if (config.batch_size == 0 || !std::has_single_bit(config.batch_size)) {
    out.push_back({"batch_size", std::to_string(config.batch_size),
                   "must be a power of two or exactly 1"});
  }
  // The slot bound only makes sense for a sane exponent; shifts past 63 are UB.
  if (k >= 1 && k < 64 && config.batch_size > (std::uint64_t{1} << (k - 1))) {
    out.push_back({"batch_size", std::to_string(config.batch_size),
                   "exceeds N/2 = " + std::to_string(std::uint64_t{1} << (k - 1)) + " slots"});
  }
  return out;
}

std::string describe(const ConfigViolation& violation) {
  return violation.field + "=" + violation.observed + ": " + violation.rule;
}

std::string describe(const CryptoConfig& config) {
  return "N=2^" + std::to_string(config.log2_ring_dim) + " L=" + std::to_string(config.depth) +
         " batch=" + std::to_string(config.batch_size) +
         " sec=" + to_string(config.security_standard);
}

std::string config_hash(const CryptoConfig& config) {
  const nlohmann::json canonical = config;
  const std::string text = canonical.dump();

  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

void to_json(nlohmann::json& j, SecurityStandard standard) { j = to_string(standard); }

void from_json(const nlohmann::json& j, SecurityStandard& standard) {
  if (j.is_number_integer()) {
    standard = parse_security_standard(std::to_string(j.get<int>()));
  } else {
    standard = parse_security_standard(j.get<std::string>());
  }
}

void to_json(nlohmann::json& j, const CryptoConfig& config) {
  j = nlohmann::json{{"log2_ring_dim", config.log2_ring_dim},
                     {"depth", config.depth},
                     {"batch_size", config.batch_size},
                     {"security_standard", config.security_standard}};
}

void from_json(const nlohmann::json& j, CryptoConfig& config) {
  try {
    config.log2_ring_dim = j.at("log2_ring_dim").get<int>();
    config.depth = j.at("depth").get<int>();
    config.batch_size = j.at("batch_size").get<std::uint64_t>();
    config.security_standard = j.value("security_standard", SecurityStandard::None);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("crypto config: ") + e.what());
  }
}

}  // namespace fheprof
