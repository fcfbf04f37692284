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

#ifndef EVENTLENS_ADAPTATION_H_
#define EVENTLENS_ADAPTATION_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "eventlens/esp.h"
#include "eventlens/event.h"

namespace eventlens {

struct AdaptationConfig {
  std::int64_t threshold = 5;        // T_s: a window counts toward the streak when c_s > T_s
  std::int64_t persistence = 3;      // N_w: consecutive windows needed for promotion
  std::size_t retention = 10000;     // unmatched events kept per skeleton, FIFO
  std::vector<std::string> group_keys;  // empty: mapping's operation path

  void Validate() const;
};

using Skeleton = std::vector<std::string>;

struct PendingSkeleton {
  std::int64_t streak = 0;
  std::vector<std::int64_t> window_counts;  // c_s for each window of the current streak
  std::deque<Event> retained;
};

struct AdaptationState {
  AdaptationConfig config;
  std::map<Skeleton, PendingSkeleton> pending;
};

struct Promotion {
  Skeleton skeleton;
  std::vector<Event> events;
};

Skeleton SkeletonOf(const Event& event, std::span<const std::string> keys,
                    const FieldMapping& mapping);
std::string SkeletonLabel(const Skeleton& skeleton, std::span<const std::string> keys);

// Counts this window's unmatched events per skeleton. A skeleton whose count
// exceeds the threshold extends its streak; any other pending skeleton
// (including one absent from this window) is dropped. Skeletons whose streak
// reaches `persistence` are removed and returned with their retained events.
std::vector<Promotion> RecordUnmatched(AdaptationState& state, const TimeWindow& window,
                                       std::span<const Event> unmatched,
                                       const FieldMapping& mapping = {});

// Re-learns each promotion and appends the rules with fresh ids. Returns the
// ids added.
std::vector<std::string> ApplyPromotions(EspSet& esps, std::span<const Promotion> promotions,
                                         const LearnerConfig& config,
                                         const FieldMapping& mapping = {});

}  // namespace eventlens

#endif  // EVENTLENS_ADAPTATION_H_
