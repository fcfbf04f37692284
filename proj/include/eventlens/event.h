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

#ifndef EVENTLENS_EVENT_H_
#define EVENTLENS_EVENT_H_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eventlens/time.h"
#include "json.hpp"

namespace eventlens {

// A scalar JSON leaf. Numbers keep their integer/real distinction; equality
// between an integer and a real compares numerically (see ScalarEquals).
using Scalar = std::variant<std::nullptr_t, bool, std::int64_t, double, std::string>;

// Non-owning counterpart used on the matching hot path.
using ScalarView = std::variant<std::nullptr_t, bool, std::int64_t, double, std::string_view>;

ScalarView AsView(const Scalar& value);
bool ScalarEquals(const ScalarView& a, const ScalarView& b);
// Total order: null < bool < number < string; integers and reals interleave
// numerically. Equivalent under this order iff ScalarEquals.
int ScalarCompare(const ScalarView& a, const ScalarView& b);
// Strings verbatim, everything else as its JSON text ("true", "42", "null").
std::string ScalarText(const ScalarView& value);
nlohmann::json ScalarToJson(const Scalar& value);
// Throws kInvalidField for arrays/objects.
Scalar ScalarFromJson(const nlohmann::json& value, std::string_view path = {});

struct ScalarLess {
  bool operator()(const Scalar& a, const Scalar& b) const {
    return ScalarCompare(AsView(a), AsView(b)) < 0;
  }
};

// Binds a concrete event schema to the (actor, operation, resources, time)
// tuple. Paths are dotted; a literal dotted key and the equivalent nesting
// resolve to the same path. Defaults follow the OCSF layout.
struct FieldMapping {
  std::string actor_path = "actor.user.name";
  std::string operation_path = "api.operation";
  std::string resources_path = "resources";
  std::string time_path = "time";

  // Throws kBadConfig when a path is empty or two paths coincide.
  void Validate() const;
  bool operator==(const FieldMapping&) const = default;
};

struct Event {
  std::string actor;
  std::string operation;
  std::vector<std::string> resources;
  TimePoint time;
  // Every remaining leaf, keyed by dotted path. Arrays are indexed (p.0, p.1).
  std::map<std::string, Scalar, std::less<>> extras;

  bool operator==(const Event&) const = default;
};

// Parses one JSON object. Throws kMalformedJson, kMissingField, kInvalidField
// or kBadTimestamp.
Event ParseEvent(std::string_view json_text, const FieldMapping& mapping = {});
Event EventFromJson(const nlohmann::json& object, const FieldMapping& mapping = {});

// Flat object keyed by the mapped paths plus extras; ParseEvent inverts it.
nlohmann::json EventToJson(const Event& event, const FieldMapping& mapping = {});

// Looks a dotted path up in the event. Mapped paths expose the actor and
// operation strings, the time as epoch milliseconds, and each resource as
// "<resources_path>.<index>". Returns nullopt when the path is absent.
std::optional<ScalarView> FieldValue(const Event& event, const FieldMapping& mapping,
                                     std::string_view path);

// All fields visible to FieldValue except the time path, in path order.
std::map<std::string, Scalar, std::less<>> FlattenFields(const Event& event, const FieldMapping& mapping);

enum class ReadMode { kStrict, kLenient };

// Reads newline-delimited JSON lazily. Blank lines (after stripping a trailing
// CR) are skipped. In strict mode the first bad line throws with its line
// number; in lenient mode bad lines are counted and skipped.
class NdjsonReader {
 public:
  NdjsonReader(std::istream& input, FieldMapping mapping, ReadMode mode = ReadMode::kStrict);

  std::optional<Event> Next();

  std::int64_t line_number() const { return line_number_; }
  std::int64_t skipped() const { return skipped_; }
  // Messages for skipped lines, "line N: ..." form.
  const std::vector<std::string>& skip_reasons() const { return skip_reasons_; }

 private:
  std::istream& input_;
  FieldMapping mapping_;
  ReadMode mode_;
  std::int64_t line_number_ = 0;
  std::int64_t skipped_ = 0;
  std::vector<std::string> skip_reasons_;
};

std::vector<Event> ReadAllEvents(std::istream& input, const FieldMapping& mapping = {},
                                 ReadMode mode = ReadMode::kStrict);
std::vector<Event> ReadEventsFile(const std::string& path, const FieldMapping& mapping = {},
                                  ReadMode mode = ReadMode::kStrict);
void WriteEvents(std::ostream& out, std::span<const Event> events,
                 const FieldMapping& mapping = {});

// A tumbling window [start, start + duration).
struct TimeWindow {
  TimePoint start;
  Millis duration{0};
  std::vector<Event> events;

  TimePoint end() const { return start + duration; }
};

// Assigns every event to window floor((t - origin) / delta) and returns the
// contiguous run of windows from the first to the last occupied one, empty
// windows included. Throws kUnsortedInput on a time regression and
// kBadConfig when delta <= 0.
std::vector<TimeWindow> WindowEvents(std::span<const Event> events, Millis delta,
                                     TimePoint origin);

}  // namespace eventlens

#endif  // EVENTLENS_EVENT_H_
