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

#include "eventlens/config.h"

#include <algorithm>
#include <fstream>
#include <set>

#include "eventlens/error.h"

namespace eventlens {

using nlohmann::json;

void Config::Validate() const {
  auto fail = [](const std::string& key, const std::string& message) {
    throw Error(ErrorCode::kBadConfig, key + ": " + message, key);
  };
  try {
    mapping().Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kBadConfig, e.what(), "mapping");
  }
  if (bin_seconds < 1) fail("bin_seconds", "must be >= 1");
  if (subsequence_length < 2) fail("subsequence_length", "must be >= 2");
  if (!(alpha > 0 && alpha < 1)) fail("alpha", "must be in (0, 1)");
  if (promotion_threshold < 0) fail("promotion_threshold", "must be >= 0");
  if (promotion_windows < 1) fail("promotion_windows", "must be >= 1");
  if (walks < 1) fail("walks", "must be >= 1");
  if (window_seconds < 1) fail("window_seconds", "must be >= 1");
  if (window_seconds != bin_seconds) fail("window_seconds", "must equal bin_seconds");
  if (extended_window_seconds < 0) fail("extended_window_seconds", "must be >= 0");
  if (profile_retention < 1) fail("profile_retention", "must be >= 1");
  if (unmatched_retention < 1) fail("unmatched_retention", "must be >= 1");
  if (max_set_size < 2) fail("max_set_size", "must be >= 2");
  if (!esp_enabled && !efp_enabled) fail("esp_enabled", "at least one detector must be enabled");
}

FieldMapping Config::mapping() const {
  return FieldMapping{actor_path, operation_path, resources_path, time_path};
}

LearnerConfig Config::learner() const {
  LearnerConfig out;
  out.generalize_paths = std::set<std::string>(generalize_paths.begin(), generalize_paths.end());
  out.max_set_size = static_cast<std::size_t>(max_set_size);
  out.group_keys = group_keys;
  return out;
}

AdaptationConfig Config::adaptation_config() const {
  AdaptationConfig out;
  out.threshold = promotion_threshold;
  out.persistence = promotion_windows;
  out.retention = static_cast<std::size_t>(unmatched_retention);
  out.group_keys = group_keys;
  return out;
}

StreamConfig Config::stream() const {
  StreamConfig out;
  out.detector.mapping = mapping();
  out.detector.esp_enabled = esp_enabled;
  out.detector.efp_enabled = efp_enabled;
  out.window = Millis{window_seconds * 1000};
  out.adaptation = adaptation;
  out.adaptation_config = adaptation_config();
  return out;
}

WalkConfig Config::walk() const { return WalkConfig{walks, seed}; }

json ConfigToJson(const Config& c) {
  return {{"actor_path", c.actor_path},
          {"operation_path", c.operation_path},
          {"resources_path", c.resources_path},
          {"time_path", c.time_path},
          {"bin_seconds", c.bin_seconds},
          {"subsequence_length", c.subsequence_length},
          {"alpha", c.alpha},
          {"promotion_threshold", c.promotion_threshold},
          {"promotion_windows", c.promotion_windows},
          {"walks", c.walks},
          {"seed", c.seed},
          {"window_seconds", c.window_seconds},
          {"extended_window_seconds", c.extended_window_seconds},
          {"adaptation", c.adaptation},
          {"profile_retention", c.profile_retention},
          {"unmatched_retention", c.unmatched_retention},
          {"group_keys", c.group_keys},
          {"generalize_paths", c.generalize_paths},
          {"max_set_size", c.max_set_size},
          {"esp_enabled", c.esp_enabled},
          {"efp_enabled", c.efp_enabled}};
}

namespace {

template <typename T>
void Assign(const json& value, const std::string& key, T& target) {
  bool ok;
  if constexpr (std::is_same_v<T, bool>) {
    ok = value.is_boolean();
  } else if constexpr (std::is_same_v<T, std::string>) {
    ok = value.is_string();
  } else if constexpr (std::is_same_v<T, double>) {
    ok = value.is_number();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    ok = value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0);
  } else if constexpr (std::is_same_v<T, std::int64_t>) {
    ok = value.is_number_integer();
  } else {
    ok = value.is_array() && std::all_of(value.begin(), value.end(),
                                         [](const json& v) { return v.is_string(); });
  }
  if (!ok) throw Error(ErrorCode::kBadConfig, key + ": wrong type", key);
  target = value.get<T>();
}

}  // namespace

Config ConfigFromJson(const json& object, Config base) {
  if (!object.is_object()) throw Error(ErrorCode::kBadConfig, "config must be a JSON object");
  for (const auto& [key, value] : object.items()) {
    if (key == "actor_path") Assign(value, key, base.actor_path);
    else if (key == "operation_path") Assign(value, key, base.operation_path);
    else if (key == "resources_path") Assign(value, key, base.resources_path);
    else if (key == "time_path") Assign(value, key, base.time_path);
    else if (key == "bin_seconds") Assign(value, key, base.bin_seconds);
    else if (key == "subsequence_length") Assign(value, key, base.subsequence_length);
    else if (key == "alpha") Assign(value, key, base.alpha);
    else if (key == "promotion_threshold") Assign(value, key, base.promotion_threshold);
    else if (key == "promotion_windows") Assign(value, key, base.promotion_windows);
    else if (key == "walks") Assign(value, key, base.walks);
    else if (key == "seed") Assign(value, key, base.seed);
    else if (key == "window_seconds") Assign(value, key, base.window_seconds);
    else if (key == "extended_window_seconds") Assign(value, key, base.extended_window_seconds);
    else if (key == "adaptation") Assign(value, key, base.adaptation);
    else if (key == "profile_retention") Assign(value, key, base.profile_retention);
    else if (key == "unmatched_retention") Assign(value, key, base.unmatched_retention);
    else if (key == "group_keys") Assign(value, key, base.group_keys);
    else if (key == "generalize_paths") Assign(value, key, base.generalize_paths);
    else if (key == "max_set_size") Assign(value, key, base.max_set_size);
    else if (key == "esp_enabled") Assign(value, key, base.esp_enabled);
    else if (key == "efp_enabled") Assign(value, key, base.efp_enabled);
    else throw Error(ErrorCode::kBadConfig, "unknown config key '" + key + "'", key);
  }
  base.Validate();
  return base;
}

Config LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config file", path);
  json object;
  try {
    object = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kBadConfig, e.what(), path);
  }
  return ConfigFromJson(object);
}

}  // namespace eventlens
