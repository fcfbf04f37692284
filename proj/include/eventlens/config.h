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

#ifndef EVENTLENS_CONFIG_H_
#define EVENTLENS_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "eventlens/adaptation.h"
#include "eventlens/detector.h"
#include "eventlens/esp.h"
#include "eventlens/event.h"
#include "eventlens/rcl.h"
#include "json.hpp"

namespace eventlens {

// Every tunable of the pipeline. The file form is one flat JSON object with
// these member names; unknown keys are rejected.
struct Config {
  std::string actor_path = "actor.user.name";
  std::string operation_path = "api.operation";
  std::string resources_path = "resources";
  std::string time_path = "time";
  std::int64_t bin_seconds = 60;
  std::int64_t subsequence_length = 6;
  double alpha = 1e-3;
  std::int64_t promotion_threshold = 5;
  std::int64_t promotion_windows = 3;
  std::int64_t walks = 100;
  std::uint64_t seed = 42;
  std::int64_t window_seconds = 60;
  std::int64_t extended_window_seconds = 3600;
  bool adaptation = true;
  std::int64_t profile_retention = 10000;
  std::int64_t unmatched_retention = 10000;
  std::vector<std::string> group_keys;
  std::vector<std::string> generalize_paths = {"*"};
  std::int64_t max_set_size = 8;
  bool esp_enabled = true;
  bool efp_enabled = true;

  // Throws kBadConfig naming the offending key.
  void Validate() const;

  FieldMapping mapping() const;
  LearnerConfig learner() const;
  AdaptationConfig adaptation_config() const;
  StreamConfig stream() const;
  WalkConfig walk() const;
  Millis bin() const { return Millis{bin_seconds * 1000}; }
  Millis extended_window() const { return Millis{extended_window_seconds * 1000}; }
};

nlohmann::json ConfigToJson(const Config& config);
// Applies the keys present in `object` on top of `base`. Throws kBadConfig.
Config ConfigFromJson(const nlohmann::json& object, Config base = {});
Config LoadConfig(const std::string& path);

}  // namespace eventlens

#endif  // EVENTLENS_CONFIG_H_
