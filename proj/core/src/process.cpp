// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "fheprof/process.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <map>

#include "fheprof/errors.hpp"

extern char** environ;

namespace fheprof {

namespace {

class Pipe {
 public:
  Pipe() {
    if (::pipe2(fds_.data(), O_CLOEXEC) != 0) {
      throw IoError(std::string("pipe2: ") + std::strerror(errno));
    }
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;

  int read_end() const { return fds_[0]; }
  int write_end() const { return fds_[1]; }
  void close_read() { reset(fds_[0]); }
  void close_write() { reset(fds_[1]); }

 private:
  static void reset(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
  std::array<int, 2> fds_{-1, -1};
};

std::string read_all(int fd) {
  std::string out;
  std::array<char, 65536> buf{};
  while (true) {
    const auto n = ::read(fd, buf.data(), buf.size());
    if (n > 0) {
      out.append(buf.data(), static_cast<std::size_t>(n));
    } else if (n == 0) {
      break;
    } else if (errno != EINTR) {
      throw IoError(std::string("read from child: ") + std::strerror(errno));
    }
  }
  return out;
}

int reap(pid_t pid) {
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw IoError(std::string("waitpid: ") + std::strerror(errno));
  }
  return status;
}

// Kills and reaps a child whose launch was abandoned.
class ChildGuard {
 public:
  explicit ChildGuard(pid_t pid) : pid_(pid) {}
  ~ChildGuard() {
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
  }
  void release() { pid_ = -1; }

 private:
  pid_t pid_;
};

}  // namespace

ChildOutcome run_child(const SpawnRequest& request, const ChildHooks& hooks) {
  if (request.argv.empty()) throw ArgumentError("empty argv");

  // Everything the child touches is prepared before fork.
  std::map<std::string, std::string> env_map;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    const std::string_view entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    env_map[std::string(entry.substr(0, eq))] = std::string(entry.substr(eq + 1));
  }
  for (const auto& [k, v] : request.environment) env_map[k] = v;
  std::vector<std::string> env_storage;
  for (const auto& [k, v] : env_map) env_storage.push_back(k + "=" + v);
  std::vector<char*> envp;
  for (auto& s : env_storage) envp.push_back(s.data());
  envp.push_back(nullptr);
  std::vector<std::string> argv_storage = request.argv;
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());
  argv.push_back(nullptr);

  Pipe gate;
  Pipe out;
  Pipe exec_status;

  const pid_t pid = ::fork();
  if (pid < 0) throw IoError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(out.write_end(), STDOUT_FILENO);
    if (request.discard_stderr) {
      const int devnull = ::open("/dev/null", O_WRONLY);
      if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
    }
    char go = 0;
    while (::read(gate.read_end(), &go, 1) < 0 && errno == EINTR) {
    }
    ::execvpe(argv[0], argv.data(), envp.data());
    const int err = errno;
    [[maybe_unused]] auto n = ::write(exec_status.write_end(), &err, sizeof(err));
    ::_exit(127);
  }

  ChildGuard guard(pid);
  gate.close_read();
  out.close_write();
  exec_status.close_write();

  if (hooks.on_spawned) hooks.on_spawned(pid);
  if (hooks.on_release) hooks.on_release();

  const auto start = std::chrono::steady_clock::now();
  const char go = 1;
  if (::write(gate.write_end(), &go, 1) != 1) {
    throw IoError(std::string("release child: ") + std::strerror(errno));
  }
  gate.close_write();

  ChildOutcome outcome;
  outcome.stdout_text = read_all(out.read_end());
  const int status = reap(pid);
  guard.release();
  outcome.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (hooks.on_exit) hooks.on_exit();

  int exec_errno = 0;
  if (::read(exec_status.read_end(), &exec_errno, sizeof(exec_errno)) ==
      static_cast<ssize_t>(sizeof(exec_errno))) {
    outcome.exec_failed = true;
    outcome.exec_error = std::strerror(exec_errno);
  }
  if (WIFEXITED(status)) {
    outcome.exit_status = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    outcome.term_signal = WTERMSIG(status);
    outcome.exit_status = 128 + outcome.term_signal;
  }
  return outcome;
}

}  // namespace fheprof
