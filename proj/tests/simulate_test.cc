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

#include "eventlens/simulate.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "eventlens/error.h"
#include "eventlens/esp.h"

namespace eventlens {
namespace {

const IncidentKind kKinds[] = {IncidentKind::kNone, IncidentKind::kDoS,
                               IncidentKind::kSecretDeactivation, IncidentKind::kUnusualActivity};

TEST(SimulateTest, DeterministicPerKindAndSeed) {
  for (auto kind : kKinds) {
    auto a = Simulate(kind, 11);
    auto b = Simulate(kind, 11);
    EXPECT_EQ(a.train_events, b.train_events);
    EXPECT_EQ(a.test_events, b.test_events);
    EXPECT_EQ(TruthToJson(a.truth), TruthToJson(b.truth));
  }
  EXPECT_NE(Simulate(IncidentKind::kDoS, 1).test_events, Simulate(IncidentKind::kDoS, 2).test_events);
}

TEST(SimulateTest, SortedAndSplitAtTrainingEnd) {
  SimulationScale scale;
  const TimePoint boundary = scale.origin + scale.train;
  for (auto kind : kKinds) {
    auto c = Simulate(kind, 3);
    auto by_time = [](const Event& a, const Event& b) { return a.time < b.time; };
    EXPECT_TRUE(std::is_sorted(c.train_events.begin(), c.train_events.end(), by_time));
    EXPECT_TRUE(std::is_sorted(c.test_events.begin(), c.test_events.end(), by_time));
    EXPECT_GE(c.train_events.front().time, scale.origin);
    EXPECT_LT(c.train_events.back().time, boundary);
    EXPECT_GE(c.test_events.front().time, boundary);
    EXPECT_LT(c.test_events.back().time, boundary + scale.test);
  }
}

TEST(SimulateTest, NoIncidentLeaksIntoTraining) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto none = Simulate(IncidentKind::kNone, seed);
    for (auto kind : kKinds) {
      auto c = Simulate(kind, seed);
      // Baseline is independent of the kind, so training must be identical.
      EXPECT_EQ(c.train_events, none.train_events);
      for (const auto& e : none.test_events) {
        EXPECT_TRUE(std::find(c.test_events.begin(), c.test_events.end(), e) != c.test_events.end());
      }
    }
  }
}

TEST(SimulateTest, NoneHasNoRootCause) {
  auto c = Simulate(IncidentKind::kNone, 4);
  EXPECT_FALSE(c.truth.label);
  EXPECT_TRUE(c.truth.root_causes.empty());
  auto back = TruthFromJson(TruthToJson(c.truth));
  EXPECT_FALSE(back.label);
  EXPECT_TRUE(back.root_causes.empty());
}

TEST(SimulateTest, IncidentsNameOneRootCause) {
  for (auto kind : {IncidentKind::kDoS, IncidentKind::kSecretDeactivation,
                    IncidentKind::kUnusualActivity}) {
    auto c = Simulate(kind, 5);
    EXPECT_TRUE(c.truth.label);
    ASSERT_EQ(c.truth.root_causes.size(), 1u);
    auto back = TruthFromJson(TruthToJson(c.truth));
    EXPECT_EQ(back.root_causes, c.truth.root_causes);
    EXPECT_EQ(back.kind, kind);
  }
}

TEST(SimulateTest, UnusualHasExactlyOneUnmatchedEvent) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto c = Simulate(IncidentKind::kUnusualActivity, seed);
    auto esps = LearnEsps(c.train_events);
    std::vector<Event> unmatched;
    for (const auto& e : c.test_events) {
      if (!esps.Classify(e)) unmatched.push_back(e);
    }
    ASSERT_EQ(unmatched.size(), 1u) << "seed " << seed;
    EXPECT_TRUE(c.truth.root_causes.contains(unmatched[0].actor));
    EXPECT_EQ(std::get<std::string>(unmatched[0].extras.at("cloud.region")), "ap-southeast-3");
  }
}

TEST(SimulateTest, NoneHasNoUnmatchedEvent) {
  auto c = Simulate(IncidentKind::kNone, 6);
  auto esps = LearnEsps(c.train_events);
  for (const auto& e : c.test_events) EXPECT_TRUE(esps.Classify(e).has_value());
}

TEST(SimulateTest, DosFloodsAtLeastFiftyTimesTheMedian) {
  SimulationScale scale;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto c = Simulate(IncidentKind::kDoS, seed);
    auto esps = LearnEsps(c.train_events);
    const std::string flooder = *c.truth.root_causes.begin();
    std::string id;
    for (const auto& e : c.test_events) {
      if (e.actor == flooder) {
        id = *esps.Classify(e);
        break;
      }
    }
    std::vector<std::int64_t> train(scale.train / scale.bin, 0);
    for (const auto& e : c.train_events) {
      if (esps.Classify(e) == id) ++train[FloorIndex(e.time, scale.origin, scale.bin)];
    }
    std::sort(train.begin(), train.end());
    const std::int64_t median = train[train.size() / 2];
    std::map<std::int64_t, std::int64_t> test;
    for (const auto& e : c.test_events) {
      if (esps.Classify(e) == id) ++test[FloorIndex(e.time, scale.origin, scale.bin)];
    }
    std::int64_t peak = 0;
    for (const auto& [bin, count] : test) peak = std::max(peak, count);
    EXPECT_GE(peak, 50 * std::max<std::int64_t>(median, 1)) << "seed " << seed;
  }
}

TEST(SimulateTest, SecretDisableThenDeniedReads) {
  auto c = Simulate(IncidentKind::kSecretDeactivation, 7);
  std::vector<Event> disables, denied;
  for (const auto& e : c.test_events) {
    if (e.operation == "DisableSecret") disables.push_back(e);
    if (e.operation == "GetSecretValue") denied.push_back(e);
  }
  ASSERT_EQ(disables.size(), 1u);
  EXPECT_TRUE(c.truth.root_causes.contains(disables[0].actor));
  EXPECT_GE(denied.size(), 4u);
  EXPECT_LE(denied.size(), 8u);
  for (const auto& e : denied) {
    EXPECT_GT(e.time, disables[0].time);
    EXPECT_EQ(e.resources, disables[0].resources);
    EXPECT_NE(e.actor, disables[0].actor);
    EXPECT_EQ(std::get<std::string>(e.extras.at("error")), "AccessDeniedException");
  }
}

TEST(SimulateTest, BadScale) {
  SimulationScale scale;
  scale.actors = 2;
  try {
    Simulate(IncidentKind::kNone, 1, scale);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadScale);
  }
  scale = {};
  scale.test = Millis{90 * 1000};
  EXPECT_THROW(Simulate(IncidentKind::kNone, 1, scale), Error);
  scale = {};
  scale.resources = 10;
  EXPECT_THROW(Simulate(IncidentKind::kNone, 1, scale), Error);
}

TEST(SimulateTest, ParseKinds) {
  EXPECT_EQ(ParseIncidentKind("dos"), IncidentKind::kDoS);
  EXPECT_EQ(ParseIncidentKind("secret_deactivation"), IncidentKind::kSecretDeactivation);
  EXPECT_EQ(ParseIncidentKind("unusual"), IncidentKind::kUnusualActivity);
  EXPECT_THROW(ParseIncidentKind("meteor"), Error);
  EXPECT_THROW(TruthFromJson(nlohmann::json::parse(R"({"label":false,"root_causes":["a"]})")), Error);
}

TEST(DropEventsTest, DropsRoughlyTheFraction) {
  auto c = Simulate(IncidentKind::kNone, 8);
  auto kept = DropEvents(c.train_events, 0.1, 1);
  const double ratio = static_cast<double>(kept.size()) / c.train_events.size();
  EXPECT_NEAR(ratio, 0.9, 0.03);
  EXPECT_EQ(kept, DropEvents(c.train_events, 0.1, 1));
  EXPECT_EQ(DropEvents(c.train_events, 0.0, 1).size(), c.train_events.size());
  EXPECT_TRUE(DropEvents(c.train_events, 1.0, 1).empty());
  EXPECT_THROW(DropEvents(c.train_events, 1.5, 1), Error);
}

}  // namespace
}  // namespace eventlens
