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

#include <gtest/gtest.h>

#include "eventlens/error.h"
#include "test_support.h"

namespace eventlens {
namespace {

using testing::At;
using testing::MakeEvent;

std::vector<Event> Burst(const std::string& op, int count, std::int64_t second) {
  std::vector<Event> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(MakeEvent("svc-" + std::to_string(i % 3), op, {"r"}, At(second + i)));
  }
  return out;
}

// Feeds per-window counts and returns the 0-based windows that promoted.
std::vector<int> PromotionWindows(const std::vector<int>& counts, AdaptationState& state) {
  std::vector<int> promoted;
  for (std::size_t w = 0; w < counts.size(); ++w) {
    TimeWindow window{At(60 * static_cast<std::int64_t>(w)), Millis{60000}, {}};
    auto events = Burst("NewOp", counts[w], 60 * static_cast<std::int64_t>(w));
    auto promotions = RecordUnmatched(state, window, events);
    if (!promotions.empty()) promoted.push_back(static_cast<int>(w));
  }
  return promoted;
}

TEST(RecordUnmatchedTest, ThreeWindowsAboveThresholdPromote) {
  AdaptationState state;
  EXPECT_EQ(PromotionWindows({10, 10, 10}, state), std::vector<int>{2});
  EXPECT_TRUE(state.pending.empty());
}

TEST(RecordUnmatchedTest, StreakResetsAtOrBelowThreshold) {
  AdaptationState state;
  EXPECT_EQ(PromotionWindows({10, 10, 2, 10, 10, 10}, state), std::vector<int>{5});
  AdaptationState exact;
  EXPECT_EQ(PromotionWindows({10, 10, 5, 10, 10}, exact), std::vector<int>{});
  EXPECT_EQ(exact.pending.begin()->second.streak, 2);
}

TEST(RecordUnmatchedTest, AbsentSkeletonResetsStreak) {
  AdaptationState state;
  EXPECT_EQ(PromotionWindows({10, 10, 0, 10, 10}, state), std::vector<int>{});
}

TEST(RecordUnmatchedTest, NothingUnmatchedLeavesEmptyStateUnchanged) {
  AdaptationState state;
  auto promotions = RecordUnmatched(state, TimeWindow{At(0), Millis{60000}, {}}, {});
  EXPECT_TRUE(promotions.empty());
  EXPECT_TRUE(state.pending.empty());
}

TEST(RecordUnmatchedTest, RetentionIsFifo) {
  AdaptationState state;
  state.config.retention = 4;
  state.config.persistence = 2;
  auto first = Burst("NewOp", 6, 0);
  auto second = Burst("NewOp", 6, 60);
  RecordUnmatched(state, TimeWindow{At(0), Millis{60000}, {}}, first);
  auto promotions = RecordUnmatched(state, TimeWindow{At(60), Millis{60000}, {}}, second);
  ASSERT_EQ(promotions.size(), 1u);
  ASSERT_EQ(promotions[0].events.size(), 4u);
  EXPECT_EQ(promotions[0].events.front(), second[2]);
  EXPECT_EQ(promotions[0].events.back(), second[5]);
}

TEST(RecordUnmatchedTest, SkeletonsTrackedIndependently) {
  AdaptationState state;
  for (int w = 0; w < 3; ++w) {
    auto events = Burst("A", 10, 60 * w);
    auto other = Burst("B", w == 1 ? 1 : 10, 60 * w);
    events.insert(events.end(), other.begin(), other.end());
    auto promotions = RecordUnmatched(state, TimeWindow{At(60 * w), Millis{60000}, {}}, events);
    if (w < 2) {
      EXPECT_TRUE(promotions.empty());
    } else {
      ASSERT_EQ(promotions.size(), 1u);
      EXPECT_EQ(promotions[0].skeleton, Skeleton{"A"});
    }
  }
}

TEST(ApplyPromotionsTest, AppendsRulesWithFreshIds) {
  EspSet esps({EspRule("esp-0001", MakeEq("api.operation", std::string("Old")))});
  Promotion promotion{{"NewOp"}, Burst("NewOp", 6, 0)};
  auto added = ApplyPromotions(esps, std::vector<Promotion>{promotion}, LearnerConfig{});
  ASSERT_EQ(added, std::vector<std::string>{"esp-0002"});
  EXPECT_EQ(esps.size(), 2u);
  EXPECT_EQ(esps.rules()[0].id(), "esp-0001");
  for (const auto& e : promotion.events) EXPECT_EQ(esps.Classify(e), "esp-0002");
}

TEST(AdaptationConfigTest, Validates) {
  AdaptationConfig config;
  config.persistence = 0;
  EXPECT_THROW(config.Validate(), Error);
}

}  // namespace
}  // namespace eventlens
