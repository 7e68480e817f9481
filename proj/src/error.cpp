// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocsim/error.hpp"

namespace noc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kDisconnected: return "Disconnected";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kEmptyAnchors: return "EmptyAnchors";
    case ErrorCode::kDuplicateAnchor: return "DuplicateAnchor";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyCenters: return "EmptyCenters";
    case ErrorCode::kWrongTopologyKind: return "WrongTopologyKind";
    case ErrorCode::kUnreachable: return "Unreachable";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kProtocolViolation: return "ProtocolViolation";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnknownElement: return "UnknownElement";
    case ErrorCode::kInvertedInterval: return "InvertedInterval";
    case ErrorCode::kUnknownKey: return "UnknownKey";
    case ErrorCode::kTypeMismatch: return "TypeMismatch";
    case ErrorCode::kMissingRequired: return "MissingRequired";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kLivelockDetected: return "LivelockDetected";
    case ErrorCode::kDeadlockDetected: return "DeadlockDetected";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace noc
