// Copyright (c) 2026, The tfev Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace tfev {

/// Bad input data or a violated precondition on data (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed invocation: unknown option, missing argument (CLI exit code 1).
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure while reading or writing an artifact.
class IoError : public DataError {
 public:
  explicit IoError(const std::string& what) : DataError(what) {}
};

[[noreturn]] void throw_data(const std::string& what);

}  // namespace tfev
