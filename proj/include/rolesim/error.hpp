// Copyright 2026 The rolesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rolesim {

enum class ErrorCode {
  kInvalidArgument,
  kIoError,
  kParseError,
  kConfigError,
  // persona bank
  kEmptyBank,
  kSchemaViolation,
  kDuplicateId,
  kSampleTooLarge,
  // gateway
  kBackendUnavailable,
  kScriptExhausted,
  kNonRetryable,
  kUnterminatedTrace,
  kEmptyText,
  kUnknownBackend,
  // memory
  kZeroVector,
  kDimensionMismatch,
  // prompts, agents, environment
  kMissingPlaceholder,
  kEmptyGeneration,
  kSelfReaction,
  kSceneInvalid,
  kInvalidResponder,
  kTurnControlUnparseable,
  kEpisodeAborted,
  // evaluation
  kScoreOutOfRange,
  kUnparseableScore,
  kNoScores,
  kUnparseableArbitration,
  kEvidenceNotFound,
  kInsufficientCritics,
  kConstantSequence,
  kLengthMismatch,
  // datagen
  kMissingReport,
  kNoAlignableSteps,
  kNoPairs,
  kPromptReplayMismatch,
};

std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library. `field`, `line` and
/// `status` carry the structured part of errors such as
/// SchemaViolation(line, field) or NonRetryable(status).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }
  std::optional<long> line() const noexcept { return line_; }
  std::optional<int> status() const noexcept { return status_; }

  Error& with_field(std::string field) {
    field_ = std::move(field);
    return *this;
  }
  Error& with_line(long line) {
    line_ = line;
    return *this;
  }
  Error& with_status(int status) {
    status_ = status;
    return *this;
  }

 private:
  ErrorCode code_;
  std::string field_;
  std::optional<long> line_;
  std::optional<int> status_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);
[[noreturn]] void fail_field(ErrorCode code, std::string field,
                             const std::string& message);

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::kInvalidArgument, message);
}

}  // namespace rolesim
