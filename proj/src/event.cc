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

#include "eventlens/event.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <utility>

#include "eventlens/error.h"

namespace eventlens {

using nlohmann::json;

ScalarView AsView(const Scalar& value) {
  return std::visit([](const auto& v) -> ScalarView { return ScalarView{v}; }, value);
}

namespace {

bool IsNumeric(const ScalarView& v) {
  return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

long double NumericValue(const ScalarView& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<long double>(*i);
  return static_cast<long double>(std::get<double>(v));
}

// null < bool < number < string
int Rank(const ScalarView& v) {
  switch (v.index()) {
    case 0: return 0;
    case 1: return 1;
    case 2:
    case 3: return 2;
    default: return 3;
  }
}

}  // namespace

int ScalarCompare(const ScalarView& a, const ScalarView& b) {
  int ra = Rank(a);
  int rb = Rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (ra) {
    case 0: return 0;
    case 1: return static_cast<int>(std::get<bool>(a)) - static_cast<int>(std::get<bool>(b));
    case 2: {
      long double x = NumericValue(a);
      long double y = NumericValue(b);
      return x < y ? -1 : (y < x ? 1 : 0);
    }
    default: {
      int c = std::get<std::string_view>(a).compare(std::get<std::string_view>(b));
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
  }
}

bool ScalarEquals(const ScalarView& a, const ScalarView& b) {
  if (IsNumeric(a) && IsNumeric(b)) return NumericValue(a) == NumericValue(b);
  if (a.index() != b.index()) return false;
  return ScalarCompare(a, b) == 0;
}

std::string ScalarText(const ScalarView& value) {
  if (const auto* s = std::get_if<std::string_view>(&value)) return std::string(*s);
  if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&value)) return json(*d).dump();
  if (const auto* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
  return "null";
}

json ScalarToJson(const Scalar& value) {
  return std::visit(
      [](const auto& v) -> json {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::nullptr_t>) {
          return nullptr;
        } else {
          return v;
        }
      },
      value);
}

Scalar ScalarFromJson(const json& value, std::string_view path) {
  switch (value.type()) {
    case json::value_t::null: return nullptr;
    case json::value_t::boolean: return value.get<bool>();
    case json::value_t::number_integer: return value.get<std::int64_t>();
    case json::value_t::number_unsigned: {
      auto u = value.get<std::uint64_t>();
      if (u <= static_cast<std::uint64_t>(INT64_MAX)) return static_cast<std::int64_t>(u);
      return static_cast<double>(u);
    }
    case json::value_t::number_float: return value.get<double>();
    case json::value_t::string: return value.get<std::string>();
    default:
      throw Error(ErrorCode::kInvalidField, "expected a scalar value", std::string(path));
  }
}

void FieldMapping::Validate() const {
  const std::string* paths[] = {&actor_path, &operation_path, &resources_path, &time_path};
  for (int i = 0; i < 4; ++i) {
    if (paths[i]->empty()) throw Error(ErrorCode::kBadConfig, "field mapping path is empty");
    for (int j = 0; j < i; ++j) {
      if (*paths[i] == *paths[j]) {
        throw Error(ErrorCode::kBadConfig, "field mapping paths must be distinct", *paths[i]);
      }
    }
  }
}

namespace {

std::string JoinPath(const std::string& prefix, std::string_view key) {
  if (prefix.empty()) return std::string(key);
  std::string out = prefix;
  out += '.';
  out += key;
  return out;
}

std::string ResourceId(const json& item, const std::string& path) {
  if (item.is_string()) {
    auto id = item.get<std::string>();
    if (id.empty()) throw Error(ErrorCode::kInvalidField, "empty resource identifier", path);
    return id;
  }
  if (item.is_object()) {
    for (const char* key : {"uid", "id", "name"}) {
      auto it = item.find(key);
      if (it != item.end() && it->is_string() && !it->get<std::string>().empty()) {
        return it->get<std::string>();
      }
    }
    throw Error(ErrorCode::kInvalidField, "resource object has no uid/id/name string", path);
  }
  throw Error(ErrorCode::kInvalidField, "resource must be a string or an object", path);
}

class EventBuilder {
 public:
  explicit EventBuilder(const FieldMapping& mapping) : mapping_(mapping) {}

  Event Build(const json& root) {
    if (!root.is_object()) throw Error(ErrorCode::kMalformedJson, "event must be a JSON object");
    Walk(root, "");
    if (!actor_) throw Error(ErrorCode::kMissingField, "missing actor", mapping_.actor_path);
    if (!operation_) {
      throw Error(ErrorCode::kMissingField, "missing operation", mapping_.operation_path);
    }
    if (!time_) throw Error(ErrorCode::kMissingField, "missing time", mapping_.time_path);
    if (!resources_) {
      throw Error(ErrorCode::kMissingField, "missing resources", mapping_.resources_path);
    }
    event_.actor = RequireName(*actor_, mapping_.actor_path);
    event_.operation = RequireName(*operation_, mapping_.operation_path);
    event_.time = ParseTimeValue(*time_);
    event_.resources = ParseResources(*resources_);
    return std::move(event_);
  }

 private:
  void Capture(const json*& slot, const json& node, const std::string& path) {
    if (slot != nullptr) throw Error(ErrorCode::kInvalidField, "field given twice", path);
    slot = &node;
  }

  void Walk(const json& node, const std::string& path) {
    if (!path.empty()) {
      if (path == mapping_.actor_path) return Capture(actor_, node, path);
      if (path == mapping_.operation_path) return Capture(operation_, node, path);
      if (path == mapping_.time_path) return Capture(time_, node, path);
      if (path == mapping_.resources_path) return Capture(resources_, node, path);
    }
    if (node.is_object()) {
      for (const auto& [key, child] : node.items()) Walk(child, JoinPath(path, key));
    } else if (node.is_array()) {
      std::size_t i = 0;
      for (const auto& child : node) Walk(child, JoinPath(path, std::to_string(i++)));
    } else {
      auto [it, inserted] = event_.extras.emplace(path, ScalarFromJson(node, path));
      if (!inserted) throw Error(ErrorCode::kInvalidField, "duplicate field path", path);
    }
  }

  static std::string RequireName(const json& node, const std::string& path) {
    if (!node.is_string() || node.get<std::string>().empty()) {
      throw Error(ErrorCode::kInvalidField, "expected a non-empty string", path);
    }
    return node.get<std::string>();
  }

  TimePoint ParseTimeValue(const json& node) const {
    if (node.is_string()) return ParseTime(node.get<std::string>());
    if (node.is_number_integer()) return FromEpochMillis(node.get<std::int64_t>());
    throw Error(ErrorCode::kBadTimestamp, "time must be an RFC 3339 string or epoch ms",
                mapping_.time_path);
  }

  std::vector<std::string> ParseResources(const json& node) const {
    const auto& path = mapping_.resources_path;
    std::vector<std::string> out;
    if (node.is_null()) return out;
    if (node.is_array()) {
      out.reserve(node.size());
      std::size_t i = 0;
      for (const auto& item : node) out.push_back(ResourceId(item, JoinPath(path, std::to_string(i++))));
      return out;
    }
    out.push_back(ResourceId(node, path));
    return out;
  }

  const FieldMapping& mapping_;
  Event event_;
  const json* actor_ = nullptr;
  const json* operation_ = nullptr;
  const json* time_ = nullptr;
  const json* resources_ = nullptr;
};

}  // namespace

Event EventFromJson(const json& object, const FieldMapping& mapping) {
  return EventBuilder(mapping).Build(object);
}

Event ParseEvent(std::string_view json_text, const FieldMapping& mapping) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedJson, e.what());
  }
  return EventFromJson(root, mapping);
}

json EventToJson(const Event& event, const FieldMapping& mapping) {
  json out = json::object();
  for (const auto& [path, value] : event.extras) out[path] = ScalarToJson(value);
  out[mapping.actor_path] = event.actor;
  out[mapping.operation_path] = event.operation;
  out[mapping.resources_path] = event.resources;
  out[mapping.time_path] = FormatTime(event.time);
  return out;
}

std::optional<ScalarView> FieldValue(const Event& event, const FieldMapping& mapping,
                                     std::string_view path) {
  if (path == mapping.actor_path) return ScalarView{std::string_view(event.actor)};
  if (path == mapping.operation_path) return ScalarView{std::string_view(event.operation)};
  if (path == mapping.time_path) return ScalarView{ToEpochMillis(event.time)};
  const auto& rp = mapping.resources_path;
  if (path.size() > rp.size() && path.compare(0, rp.size(), rp) == 0 && path[rp.size()] == '.') {
    auto digits = path.substr(rp.size() + 1);
    std::size_t index = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (ec == std::errc() && end == digits.data() + digits.size()) {
      if (index < event.resources.size()) return ScalarView{std::string_view(event.resources[index])};
      return std::nullopt;
    }
  }
  auto it = event.extras.find(path);
  if (it == event.extras.end()) return std::nullopt;
  return AsView(it->second);
}

std::map<std::string, Scalar, std::less<>> FlattenFields(const Event& event,
                                                         const FieldMapping& mapping) {
  auto out = event.extras;
  out[mapping.actor_path] = event.actor;
  out[mapping.operation_path] = event.operation;
  for (std::size_t i = 0; i < event.resources.size(); ++i) {
    out[mapping.resources_path + "." + std::to_string(i)] = event.resources[i];
  }
  return out;
}

NdjsonReader::NdjsonReader(std::istream& input, FieldMapping mapping, ReadMode mode)
    : input_(input), mapping_(std::move(mapping)), mode_(mode) {}

std::optional<Event> NdjsonReader::Next() {
  std::string line;
  while (std::getline(input_, line)) {
    ++line_number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      return ParseEvent(line, mapping_);
    } catch (const Error& e) {
      if (mode_ == ReadMode::kStrict) {
        throw Error(e.code(), "line " + std::to_string(line_number_) + ": " + e.what(), e.path(),
                    line_number_);
      }
      ++skipped_;
      skip_reasons_.push_back("line " + std::to_string(line_number_) + ": " + e.what());
    }
  }
  return std::nullopt;
}

std::vector<Event> ReadAllEvents(std::istream& input, const FieldMapping& mapping, ReadMode mode) {
  NdjsonReader reader(input, mapping, mode);
  std::vector<Event> out;
  while (auto event = reader.Next()) out.push_back(std::move(*event));
  return out;
}

std::vector<Event> ReadEventsFile(const std::string& path, const FieldMapping& mapping,
                                  ReadMode mode) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open events file", path);
  return ReadAllEvents(in, mapping, mode);
}

void WriteEvents(std::ostream& out, std::span<const Event> events, const FieldMapping& mapping) {
  for (const auto& event : events) out << EventToJson(event, mapping).dump() << '\n';
}

std::vector<TimeWindow> WindowEvents(std::span<const Event> events, Millis delta,
                                     TimePoint origin) {
  if (delta.count() <= 0) throw Error(ErrorCode::kBadConfig, "window duration must be positive");
  std::vector<TimeWindow> windows;
  if (events.empty()) return windows;
  const std::int64_t first = FloorIndex(events.front().time, origin, delta);
  TimePoint previous = events.front().time;
  for (const auto& event : events) {
    if (event.time < previous) {
      throw Error(ErrorCode::kUnsortedInput,
                  "event at " + FormatTime(event.time) + " precedes " + FormatTime(previous));
    }
    previous = event.time;
    auto index = static_cast<std::size_t>(FloorIndex(event.time, origin, delta) - first);
    while (windows.size() <= index) {
      windows.push_back(TimeWindow{origin + delta * (first + static_cast<std::int64_t>(windows.size())),
                                   delta, {}});
    }
    windows[index].events.push_back(event);
  }
  return windows;
}

}  // namespace eventlens
