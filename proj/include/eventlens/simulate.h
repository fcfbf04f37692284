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

#ifndef EVENTLENS_SIMULATE_H_
#define EVENTLENS_SIMULATE_H_

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eventlens/event.h"
#include "json.hpp"

namespace eventlens {

enum class IncidentKind { kNone, kDoS, kSecretDeactivation, kUnusualActivity };

std::string_view IncidentKindName(IncidentKind kind);  // "none", "dos", "secret", "unusual"
// Accepts the short names plus "secret_deactivation" and "unusual_activity".
// Throws kBadConfig.
IncidentKind ParseIncidentKind(std::string_view name);

struct SimulationScale {
  int actors = 50;
  int resources = 200;  // split evenly between actors
  Millis train{2 * 3600 * 1000};
  Millis test{3600 * 1000};
  Millis bin{60 * 1000};
  TimePoint origin = FromEpochMillis(1747612800000);  // 2025-05-19T00:00:00Z

  void Validate() const;  // kBadScale
};

struct GroundTruth {
  IncidentKind kind = IncidentKind::kNone;
  std::uint64_t seed = 0;
  bool label = false;
  std::set<std::string> root_causes;
};

nlohmann::json TruthToJson(const GroundTruth& truth);
GroundTruth TruthFromJson(const nlohmann::json& document);

struct SyntheticCase {
  IncidentKind kind = IncidentKind::kNone;
  std::uint64_t seed = 0;
  std::vector<Event> train_events;  // time-ordered
  std::vector<Event> test_events;   // time-ordered, starts where training ends
  GroundTruth truth;
};

// Routine traffic: every actor runs two operations from a fixed vocabulary on
// its own resources, each on a fixed schedule (period, phase, count per bin)
// with random sub-bin jitter. The incident is injected into the test range
// only. Pure function of (kind, seed, scale).
SyntheticCase Simulate(IncidentKind kind, std::uint64_t seed, const SimulationScale& scale = {});

// Keeps each event independently with probability 1 - fraction.
std::vector<Event> DropEvents(std::span<const Event> events, double fraction, std::uint64_t seed);

}  // namespace eventlens

#endif  // EVENTLENS_SIMULATE_H_
