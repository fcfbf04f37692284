// Copyright 2026 The Eventlens Authors
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

#ifndef EVENTLENS_ERROR_H_
#define EVENTLENS_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace eventlens {

enum class ErrorCode {
  kMalformedJson,
  kMissingField,
  kInvalidField,
  kBadTimestamp,
  kUnsortedInput,
  kEmptyTraining,
  kSchemaError,
  kSeriesTooShort,
  kEmptyProfile,
  kUnknownEsp,
  kDanglingAnomaly,
  kLengthMismatch,
  kEmptyTruth,
  kBadScale,
  kBadConfig,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every operational failure in the library surfaces as this exception. The
// optional path names the offending field, file or rule; line is the 1-based
// input line for NDJSON readers (0 when not applicable).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string path = {},
        std::int64_t line = 0);

  ErrorCode code() const { return code_; }
  const std::string& path() const { return path_; }
  std::int64_t line() const { return line_; }

  // {"error": "<code>", "message": ..., "path": ..., "line": ...}
  std::string ToJson() const;

 private:
  ErrorCode code_;
  std::string path_;
  std::int64_t line_;
};

}  // namespace eventlens

#endif  // EVENTLENS_ERROR_H_
