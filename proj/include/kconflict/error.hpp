// Copyright 2026 The kconflict Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KCONFLICT_ERROR_HPP_
#define KCONFLICT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace kconflict {

enum class ErrorCode {
  kParse,         // malformed JSON or file framing
  kSchema,        // missing/invalid field
  kValidation,    // data violates an instance invariant
  kConflict,      // duplicate key
  kNotFound,      // unknown identifier
  kInsufficient,  // not enough entities to partition
  kEmptyRange,    // nothing qualifies for a sampling request
  kNoCandidate,   // a policy has nothing to draw from
  kUnlinked,      // alias policy on an answer without an entity id
  kNoOccurrence,  // answer does not occur in the context
  kResidual,      // substitution would leave an original surface behind
  kMissingPrediction,
  kInvalidArgument,
  kIo,
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kSchema: return "schema error";
    case ErrorCode::kValidation: return "validation error";
    case ErrorCode::kConflict: return "conflict error";
    case ErrorCode::kNotFound: return "not found";
    case ErrorCode::kInsufficient: return "insufficient population";
    case ErrorCode::kEmptyRange: return "empty range";
    case ErrorCode::kNoCandidate: return "no candidate";
    case ErrorCode::kUnlinked: return "unlinked answer";
    case ErrorCode::kNoOccurrence: return "no occurrence";
    case ErrorCode::kResidual: return "residual occurrence";
    case ErrorCode::kMissingPrediction: return "missing prediction";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kIo: return "i/o error";
  }
  return "error";
}

// All library failures are reported through this exception type. The code
// lets callers (the CLI, per-instance skip logic) branch without parsing
// messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kconflict

#endif  // KCONFLICT_ERROR_HPP_
