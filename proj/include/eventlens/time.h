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

#ifndef EVENTLENS_TIME_H_
#define EVENTLENS_TIME_H_

#include <chrono>
#include <string>
#include <string_view>

namespace eventlens {

// All timestamps are UTC with millisecond resolution.
using Millis = std::chrono::milliseconds;
using TimePoint = std::chrono::sys_time<Millis>;

// Accepts RFC 3339 ("2025-05-19T17:38:32Z", fractional seconds, numeric
// offsets). Sub-millisecond digits are truncated. Throws kBadTimestamp.
TimePoint ParseTime(std::string_view text);

// Formats as RFC 3339 in UTC; fractional seconds only when non-zero.
std::string FormatTime(TimePoint t);

inline TimePoint FromEpochMillis(std::int64_t ms) { return TimePoint{Millis{ms}}; }
inline std::int64_t ToEpochMillis(TimePoint t) { return t.time_since_epoch().count(); }

// floor((t - origin) / step) using floor division for times before origin.
std::int64_t FloorIndex(TimePoint t, TimePoint origin, Millis step);

}  // namespace eventlens

#endif  // EVENTLENS_TIME_H_
