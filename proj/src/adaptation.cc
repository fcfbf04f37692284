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

#include "eventlens/adaptation.h"

#include <utility>

#include "eventlens/error.h"

namespace eventlens {

void AdaptationConfig::Validate() const {
  if (threshold < 0) throw Error(ErrorCode::kBadConfig, "promotion threshold must be >= 0");
  if (persistence < 1) throw Error(ErrorCode::kBadConfig, "promotion windows must be >= 1");
  if (retention < 1) throw Error(ErrorCode::kBadConfig, "unmatched retention must be >= 1");
}

Skeleton SkeletonOf(const Event& event, std::span<const std::string> keys,
                    const FieldMapping& mapping) {
  Skeleton out;
  out.reserve(keys.size());
  for (const auto& key : keys) {
    auto value = FieldValue(event, mapping, key);
    out.push_back(value ? ScalarText(*value) : std::string(1, '\0'));
  }
  return out;
}

std::string SkeletonLabel(const Skeleton& skeleton, std::span<const std::string> keys) {
  std::string out;
  for (std::size_t i = 0; i < skeleton.size() && i < keys.size(); ++i) {
    if (!out.empty()) out += ',';
    out += keys[i] + "=" + (skeleton[i] == std::string(1, '\0') ? "<missing>" : skeleton[i]);
  }
  return out;
}

std::vector<Promotion> RecordUnmatched(AdaptationState& state, const TimeWindow& /*window*/,
                                       std::span<const Event> unmatched,
                                       const FieldMapping& mapping) {
  const std::vector<std::string> keys =
      state.config.group_keys.empty() ? std::vector<std::string>{mapping.operation_path}
                                      : state.config.group_keys;

  std::map<Skeleton, std::vector<const Event*>> seen;
  for (const auto& event : unmatched) seen[SkeletonOf(event, keys, mapping)].push_back(&event);

  // A pending skeleton missing from this window had c_s = 0 <= T_s.
  std::erase_if(state.pending, [&seen](const auto& entry) { return !seen.contains(entry.first); });

  std::vector<Promotion> promotions;
  for (auto& [skeleton, events] : seen) {
    const auto count = static_cast<std::int64_t>(events.size());
    if (count <= state.config.threshold) {
      state.pending.erase(skeleton);
      continue;
    }
    auto& entry = state.pending[skeleton];
    ++entry.streak;
    entry.window_counts.push_back(count);
    for (const Event* event : events) {
      entry.retained.push_back(*event);
      if (entry.retained.size() > state.config.retention) entry.retained.pop_front();
    }
    if (entry.streak >= state.config.persistence) {
      promotions.push_back(
          Promotion{skeleton, std::vector<Event>(entry.retained.begin(), entry.retained.end())});
      state.pending.erase(skeleton);
    }
  }
  return promotions;
}

std::vector<std::string> ApplyPromotions(EspSet& esps, std::span<const Promotion> promotions,
                                         const LearnerConfig& config,
                                         const FieldMapping& mapping) {
  std::vector<std::string> added;
  for (const auto& promotion : promotions) {
    if (promotion.events.empty()) continue;
    auto next = esps.NextId();
    auto first_id = static_cast<std::size_t>(std::stoull(next.substr(4)));
    EspSet learned = LearnEsps(promotion.events, config, mapping, first_id);
    for (const auto& rule : learned.rules()) {
      added.push_back(rule.id());
      esps.Add(rule);
    }
  }
  return added;
}

}  // namespace eventlens
