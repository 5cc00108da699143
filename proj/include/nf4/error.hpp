// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nf4 {

enum class ErrorKind {
  kInvalidArgument,
  kNonFinite,
  kCodebookMismatch,
  kInvalidTensor,
  kNotNf4k,
  kUnsupportedVersion,
  kTruncated,
  kCorrupt,
  kIo,
  kAllocation,
};

// Single exception type for all data and argument errors raised by the
// library. The kind lets callers (the CLI in particular) map failures to
// exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nf4
