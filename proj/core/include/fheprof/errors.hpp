// Copyright (C) 2026 The fheprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fheprof {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates an operation's precondition.
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error("argument error: " + what) {}
};

class UnknownBenchmarkError : public Error {
 public:
  explicit UnknownBenchmarkError(const std::string& name)
      : Error("unknown benchmark '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// A merged crypto configuration violates the CryptoConfig invariants.
class InvalidConfigError : public Error {
 public:
  explicit InvalidConfigError(const std::string& what) : Error("invalid configuration: " + what) {}
};

/// Malformed structured text. `offset` is the byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error("parse error at byte " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Well-formed document with missing or mistyped fields.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error("schema error: " + what) {}
};

/// A runner violated the runner protocol.
class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what) : Error("protocol error: " + what) {}
};

/// The host lacks a facility (energy counter, PMU, stack sampler).
class CapabilityError : public Error {
 public:
  explicit CapabilityError(const std::string& what) : Error("capability error: " + what) {}
};

/// A prediction needs a primitive cost the table does not hold.
class CoverageError : public Error {
 public:
  explicit CoverageError(const std::string& what) : Error("coverage error: " + what) {}
};

class EmptyPlanError : public Error {
 public:
  explicit EmptyPlanError(const std::string& what) : Error("empty plan: " + what) {}
};

class EmptyProfileError : public Error {
 public:
  EmptyProfileError() : Error("empty profile: no stack samples to fold") {}
};

/// Results store is held by another writer.
class LockError : public Error {
 public:
  explicit LockError(const std::string& what) : Error("lock error: " + what) {}
};

class MigrationError : public Error {
 public:
  MigrationError(int found, int expected)
      : Error("migration error: store schema version " + std::to_string(found) +
              " cannot be read by schema version " + std::to_string(expected)),
        found_(found),
        expected_(expected) {}
  int found() const { return found_; }
  int expected() const { return expected_; }

 private:
  int found_;
  int expected_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("i/o error: " + what) {}
};

}  // namespace fheprof
