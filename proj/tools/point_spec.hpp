// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string_view>

#include "fheprof/crypto_config.hpp"
#include "fheprof/perf_model.hpp"

namespace fheprof::cli {

/// Parsed `--at` argument, e.g. "N=2^16,L=10,batch=4096,sec=128,threads=8".
struct PointSpec {
  ConfigOverrides overrides;
  std::optional<int> threads;

  /// Unset fields fall back to `defaults` and one thread.
  CostKey resolve(const CryptoConfig& defaults) const;
};

/// Keys: N (2^k or a power of two), logN, L or depth, batch, sec or security,
/// threads or t. Throws ArgumentError on anything else.
PointSpec parse_point_spec(std::string_view text);

}  // namespace fheprof::cli
