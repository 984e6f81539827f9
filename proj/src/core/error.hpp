// Copyright 2026 The CLPDD Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace clpdd {

// Mirrors clpdd_status in the public C header; keep the two in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kDimensionMismatch = 2,
  kNotPositiveDefinite = 3,
  kNonFinite = 4,
  kConfig = 5,
  kIo = 6,
  kBadMagic = 7,
  kVersionMismatch = 8,
  kTruncated = 9,
  kLabelOutOfRange = 10,
  kInsufficientData = 11,
  kDivergence = 12,
  kState = 13,
  kGradcheckFailed = 14,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace clpdd
