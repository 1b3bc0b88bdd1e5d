// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace endogeo {

enum class ErrorCode {
  kParse,              // malformed text/binary input
  kFormat,             // unsupported or inconsistent file header
  kIo,                 // file cannot be opened/written
  kOrdering,           // frame indices not strictly increasing
  kCoverage,           // missing anchor frame or segment
  kCalibration,        // non-positive baseline / focal length
  kDegenerateRig,      // zero stereo baseline
  kDegenerateSegment,  // segment with fewer than two entries
  kAlignment,          // too few or degenerate point pairs
  kInvalidPoint,       // non-positive depth in (un)projection
  kDimensionMismatch,
  kEmptySet,           // no valid samples to reduce over
  kDomain,             // value outside its admissible range
  kConfig,             // invalid or unknown configuration value
  kNumeric,            // non-finite intermediate result
};

// Process exit code for each error category: 2 for bad input, 3 for violated
// preconditions, 4 for numeric failures.
int exit_code(ErrorCode code);

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  // 1-based line number for text-format parse errors.
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace endogeo
