// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace noc {

enum class ErrorCode {
  kInvalidParams,
  kDisconnected,
  kInfeasible,
  kEmptyAnchors,
  kDuplicateAnchor,
  kKTooLarge,
  kDimensionMismatch,
  kEmptyCenters,
  kWrongTopologyKind,
  kUnreachable,
  kBudgetExceeded,
  kProtocolViolation,
  kSyntaxError,
  kUnknownElement,
  kInvertedInterval,
  kUnknownKey,
  kTypeMismatch,
  kMissingRequired,
  kConfigError,
  kLivelockDetected,
  kDeadlockDetected,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace noc
