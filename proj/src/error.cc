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

#include "eventlens/error.h"

#include <utility>

#include "json.hpp"

namespace eventlens {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedJson: return "MalformedJson";
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kInvalidField: return "InvalidField";
    case ErrorCode::kBadTimestamp: return "BadTimestamp";
    case ErrorCode::kUnsortedInput: return "UnsortedInput";
    case ErrorCode::kEmptyTraining: return "EmptyTraining";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kSeriesTooShort: return "SeriesTooShort";
    case ErrorCode::kEmptyProfile: return "EmptyProfile";
    case ErrorCode::kUnknownEsp: return "UnknownEsp";
    case ErrorCode::kDanglingAnomaly: return "DanglingAnomaly";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyTruth: return "EmptyTruth";
    case ErrorCode::kBadScale: return "BadScale";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string message, std::string path, std::int64_t line)
    : std::runtime_error(std::move(message)), code_(code), path_(std::move(path)), line_(line) {}

std::string Error::ToJson() const {
  nlohmann::json out;
  out["error"] = std::string(ErrorCodeName(code_));
  out["message"] = what();
  if (!path_.empty()) out["path"] = path_;
  if (line_ > 0) out["line"] = line_;
  return out.dump();
}

}  // namespace eventlens
