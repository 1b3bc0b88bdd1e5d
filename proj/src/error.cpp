// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "endogeo/error.hpp"

namespace endogeo {

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kFormat:
    case ErrorCode::kIo:
    case ErrorCode::kOrdering:
      return 2;
    case ErrorCode::kNumeric:
      return 4;
    default:
      return 3;
  }
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kOrdering: return "ordering error";
    case ErrorCode::kCoverage: return "coverage error";
    case ErrorCode::kCalibration: return "calibration error";
    case ErrorCode::kDegenerateRig: return "degenerate rig";
    case ErrorCode::kDegenerateSegment: return "degenerate segment";
    case ErrorCode::kAlignment: return "alignment error";
    case ErrorCode::kInvalidPoint: return "invalid point";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kEmptySet: return "empty set";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kNumeric: return "numeric failure";
  }
  return "error";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> line)
    : std::runtime_error(line ? message + " (line " + std::to_string(*line) + ")"
                              : message),
      code_(code),
      line_(line) {}

}  // namespace endogeo
