// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fheprof {

struct SpawnRequest {
  std::vector<std::string> argv;
  /// Variables set on top of the parent's environment.
  std::vector<std::pair<std::string, std::string>> environment;
  bool discard_stderr = false;
};

/// Callbacks around a gated child: the child is forked, held before exec
/// until on_release returns, and timed from release to reap.
struct ChildHooks {
  std::function<void(int pid)> on_spawned;
  std::function<void()> on_release;
  std::function<void()> on_exit;
};

struct ChildOutcome {
  /// Exit code, or 128 + signal number when the child was killed.
  int exit_status = 0;
  int term_signal = 0;
  bool exec_failed = false;
  std::string exec_error;
  std::string stdout_text;
  double wall_seconds = 0.0;

  bool success() const { return !exec_failed && exit_status == 0; }
};

/// Runs one child to completion, capturing its standard output.
ChildOutcome run_child(const SpawnRequest& request, const ChildHooks& hooks = {});

}  // namespace fheprof
