// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <csignal>
#include <string>
#include <vector>

#include "fheprof/process.hpp"

using namespace fheprof;

TEST(RunChild, CapturesStdoutAndExitCode) {
  const auto out = run_child({{"/bin/sh", "-c", "echo hello; exit 3"}, {}, false});
  EXPECT_FALSE(out.exec_failed);
  EXPECT_EQ(out.exit_status, 3);
  EXPECT_EQ(out.stdout_text, "hello\n");
  EXPECT_FALSE(out.success());
  EXPECT_GE(out.wall_seconds, 0.0);
}

TEST(RunChild, PassesEnvironment) {
  const auto out = run_child({{"/bin/sh", "-c", "printf %s \"$OMP_NUM_THREADS\""}, {{"OMP_NUM_THREADS", "6"}}, false});
  EXPECT_TRUE(out.success());
  EXPECT_EQ(out.stdout_text, "6");
}

TEST(RunChild, ReportsExecFailure) {
  const auto out = run_child({{"/nonexistent/runner-binary"}, {}, false});
  EXPECT_TRUE(out.exec_failed);
  EXPECT_FALSE(out.exec_error.empty());
  EXPECT_FALSE(out.success());
}

TEST(RunChild, SignalBecomesExitStatus) {
  const auto out = run_child({{"/bin/sh", "-c", "kill -9 $$"}, {}, false});
  EXPECT_EQ(out.term_signal, SIGKILL);
  EXPECT_EQ(out.exit_status, 128 + SIGKILL);
}

TEST(RunChild, HooksRunInOrder) {
  std::vector<std::string> calls;
  int seen_pid = 0;
  ChildHooks hooks;
  hooks.on_spawned = [&](int pid) {
    seen_pid = pid;
    calls.push_back("spawned");
  };
  hooks.on_release = [&] { calls.push_back("release"); };
  hooks.on_exit = [&] { calls.push_back("exit"); };
  const auto out = run_child({{"/bin/true"}, {}, false}, hooks);
  EXPECT_TRUE(out.success());
  EXPECT_GT(seen_pid, 0);
  EXPECT_EQ(calls, (std::vector<std::string>{"spawned", "release", "exit"}));
}

TEST(RunChild, WallTimeCoversChild) {
  const auto out = run_child({{"/bin/sh", "-c", "sleep 0.2"}, {}, false});
  EXPECT_TRUE(out.success());
  EXPECT_GE(out.wall_seconds, 0.19);
}

TEST(RunChild, HookExceptionReapsChild) {
  ChildHooks hooks;
  hooks.on_spawned = [](int) { throw std::runtime_error("attach failed"); };
  EXPECT_THROW(run_child({{"/bin/sh", "-c", "sleep 5"}, {}, false}, hooks), std::runtime_error);
}
