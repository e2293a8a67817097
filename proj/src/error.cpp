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

#include "rolesim/error.hpp"

namespace rolesim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kEmptyBank: return "EmptyBank";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kSampleTooLarge: return "SampleTooLarge";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kScriptExhausted: return "ScriptExhausted";
    case ErrorCode::kNonRetryable: return "NonRetryable";
    case ErrorCode::kUnterminatedTrace: return "UnterminatedTrace";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kUnknownBackend: return "UnknownBackend";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kMissingPlaceholder: return "MissingPlaceholder";
    case ErrorCode::kEmptyGeneration: return "EmptyGeneration";
    case ErrorCode::kSelfReaction: return "SelfReaction";
    case ErrorCode::kSceneInvalid: return "SceneInvalid";
    case ErrorCode::kInvalidResponder: return "InvalidResponder";
    case ErrorCode::kTurnControlUnparseable: return "TurnControlUnparseable";
    case ErrorCode::kEpisodeAborted: return "EpisodeAborted";
    case ErrorCode::kScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::kUnparseableScore: return "UnparseableScore";
    case ErrorCode::kNoScores: return "NoScores";
    case ErrorCode::kUnparseableArbitration: return "UnparseableArbitration";
    case ErrorCode::kEvidenceNotFound: return "EvidenceNotFound";
    case ErrorCode::kInsufficientCritics: return "InsufficientCritics";
    case ErrorCode::kConstantSequence: return "ConstantSequence";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kMissingReport: return "MissingReport";
    case ErrorCode::kNoAlignableSteps: return "NoAlignableSteps";
    case ErrorCode::kNoPairs: return "NoPairs";
    case ErrorCode::kPromptReplayMismatch: return "PromptReplayMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

void fail_field(ErrorCode code, std::string field, const std::string& message) {
  Error err(code, message);
  err.with_field(std::move(field));
  throw err;
}

}  // namespace rolesim
