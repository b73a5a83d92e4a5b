// Copyright 2026 The adbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adbench {

// Distinct failure signals. The CLI maps these onto its exit codes.
enum class ErrorCode {
  kIo,
  kBadMagic,
  kUnknownDtype,
  kTruncated,
  kShapeMismatch,
  kInvalidArgument,
  kUnsupportedFormat,
  kValidation,
  kDuplicateCategory,
  kDanglingPath,
  kMissingMask,
  kNoAnomalousRecord,
  kDegenerateLabels,
  kPrecondition,
  kIntegrity,
  kMalformed,
  kDivergence,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kUnknownDtype: return "unknown-dtype";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kUnsupportedFormat: return "unsupported-format";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kDuplicateCategory: return "duplicate-category";
    case ErrorCode::kDanglingPath: return "dangling-path";
    case ErrorCode::kMissingMask: return "missing-mask";
    case ErrorCode::kNoAnomalousRecord: return "no-anomalous-record";
    case ErrorCode::kDegenerateLabels: return "degenerate-labels";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kIntegrity: return "integrity";
    case ErrorCode::kMalformed: return "malformed";
    case ErrorCode::kDivergence: return "divergence";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Manifest and schema problems; the CLI reports these with exit code 2.
  bool is_validation() const noexcept {
    switch (code_) {
      case ErrorCode::kValidation:
      case ErrorCode::kDuplicateCategory:
      case ErrorCode::kDanglingPath:
      case ErrorCode::kMissingMask:
      case ErrorCode::kNoAnomalousRecord:
      case ErrorCode::kBadMagic:
      case ErrorCode::kUnknownDtype:
      case ErrorCode::kTruncated:
      case ErrorCode::kUnsupportedFormat:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace adbench
