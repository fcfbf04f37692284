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

#include "eventlens/efp.h"

#include <gtest/gtest.h>

#include <random>

#include "eventlens/error.h"
#include "test_support.h"

namespace eventlens {
namespace {

using testing::At;
using testing::BruteForceProfile;
using testing::BruteForceSurvival;
using testing::MakeEvent;

FrequencySeries Series(std::vector<std::int64_t> counts, std::string id = "A") {
  return FrequencySeries{std::move(id), At(0), Millis{60000}, std::move(counts)};
}

// A model holding one hand-built profile.
EfpModel HandModel(std::vector<double> distances, std::vector<CountWindow> windows,
                   double alpha = 0.01) {
  EfpModel model;
  model.alpha = alpha;
  model.m = windows.empty() ? 2 : windows.front().size();
  DistanceProfile profile;
  profile.esp_id = "A";
  profile.m = model.m;
  profile.distances.assign(distances.begin(), distances.end());
  profile.windows.assign(windows.begin(), windows.end());
  model.profiles["A"] = profile;
  return model;
}

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

TEST(BinFrequenciesTest, CountsPerBin) {
  std::vector<Event> events = {MakeEvent("a", "o", {}, At(0)), MakeEvent("a", "o", {}, At(10)),
                               MakeEvent("a", "o", {}, At(70)), MakeEvent("a", "o", {}, At(190))};
  std::vector<LabeledEvent> labeled = {{&events[0], "A"}, {&events[1], "A"}, {&events[2], "A"},
                                       {&events[3], "B"}};
  auto series = BinFrequencies(labeled, At(0), Millis{60000}, At(300));
  ASSERT_EQ(series.size(), 2u);
  EXPECT_EQ(series["A"].counts, (std::vector<std::int64_t>{2, 1, 0, 0, 0}));
  EXPECT_EQ(series["B"].counts, (std::vector<std::int64_t>{0, 0, 0, 1, 0}));
  EXPECT_FALSE(series.contains("C"));
  auto two = BinFrequencies(std::span(labeled).first(3), At(0), Millis{60000}, At(120));
  EXPECT_EQ(two["A"].counts, (std::vector<std::int64_t>{2, 1}));
}

TEST(BuildProfileTest, HandComputedSpike) {
  auto profile = BuildProfile(Series({1, 1, 1, 1, 5, 1, 1, 1}), 2);
  ASSERT_EQ(profile.distances.size(), 7u);
  EXPECT_EQ(profile.distances[0], 0.0);
  EXPECT_EQ(profile.distances[3], 4.0);
  EXPECT_EQ(profile.windows.size(), 7u);
}

TEST(BuildProfileTest, ConstantSeriesIsAllZero) {
  for (std::size_t m : {2u, 3u, 6u}) {
    auto profile = BuildProfile(Series(std::vector<std::int64_t>(40, 7)), m);
    EXPECT_EQ(profile.distances.size(), 40 - m + 1);
    for (double d : profile.distances) EXPECT_EQ(d, 0.0);
  }
}

TEST(BuildProfileTest, TooShort) {
  EXPECT_EQ(CodeOf([] { BuildProfile(Series(std::vector<std::int64_t>(11, 1)), 6); }),
            ErrorCode::kSeriesTooShort);
  EXPECT_NO_THROW(BuildProfile(Series(std::vector<std::int64_t>(12, 1)), 6));
}

TEST(BuildProfileTest, LookBothWays) {
  // The last window's only match lies in the past.
  auto profile = BuildProfile(Series({9, 9, 0, 0, 0, 0, 9, 9}), 2);
  ASSERT_EQ(profile.distances.size(), 7u);
  EXPECT_EQ(profile.distances[6], 0.0);
  EXPECT_EQ(profile.distances[0], 0.0);
}

TEST(BuildProfileTest, ShortSeriesOmitsWindowsWithoutPartner) {
  // len = 2M: only windows 0 and M have a non-overlapping partner.
  auto profile = BuildProfile(Series({1, 2, 3, 4, 5, 6}), 3);
  ASSERT_EQ(profile.distances.size(), 2u);
  EXPECT_DOUBLE_EQ(profile.distances[0], std::sqrt(27.0));
  EXPECT_EQ(profile.windows.size(), 4u);
}

TEST(BuildProfileTest, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t m = 2 + rng() % 8;
    std::size_t len = 2 * m + rng() % 120;
    std::vector<std::int64_t> counts(len);
    for (auto& c : counts) c = static_cast<std::int64_t>(rng() % 50);
    auto profile = BuildProfile(Series(counts), m);
    auto oracle = BruteForceProfile(counts, m);
    ASSERT_EQ(profile.distances.size(), oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) EXPECT_NEAR(profile.distances[i], oracle[i], 1e-9);
  }
}

TEST(BuildProfileTest, MagnitudeHomogeneity) {
  std::mt19937_64 rng(19);
  std::vector<std::int64_t> counts(60);
  for (auto& c : counts) c = static_cast<std::int64_t>(rng() % 10);
  auto base = BuildProfile(Series(counts), 4);
  for (std::int64_t c : {2, 3, 10}) {
    auto scaled_counts = counts;
    for (auto& v : scaled_counts) v *= c;
    auto scaled = BuildProfile(Series(scaled_counts), 4);
    for (std::size_t i = 0; i < base.distances.size(); ++i) {
      EXPECT_NEAR(scaled.distances[i], c * base.distances[i], 1e-9);
    }
  }
}

TEST(NearestDistanceTest, Examples) {
  auto model = HandModel({}, {{1, 1}});
  const auto& p = model.profiles["A"];
  EXPECT_EQ(NearestDistance(p, std::vector<std::int64_t>{4, 5}), 5.0);
  EXPECT_EQ(NearestDistance(p, std::vector<std::int64_t>{1, 1}), 0.0);
  auto two = HandModel({}, {{0, 0}, {10, 10}});
  EXPECT_EQ(NearestDistance(two.profiles["A"], std::vector<std::int64_t>{1, 0}), 1.0);
  DistanceProfile empty;
  empty.m = 2;
  EXPECT_EQ(CodeOf([&] { NearestDistance(empty, std::vector<std::int64_t>{1, 0}); }),
            ErrorCode::kEmptyProfile);
}

TEST(SurvivalTest, HandComputedEcdf) {
  const std::vector<double> f = {0, 0, 1, 1, 2};
  EXPECT_EQ(Survival(f, 2.0), 0.0);
  EXPECT_EQ(Survival(f, 1.5), 0.2);
  EXPECT_EQ(Survival(f, 0.0), 0.6);
  EXPECT_EQ(Survival(f, -1.0), 1.0);
  EXPECT_EQ(CodeOf([] { Survival(std::vector<double>{}, 1.0); }), ErrorCode::kEmptyProfile);
}

TEST(SurvivalTest, NonIncreasingAndMatchesOracle) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> f(1 + rng() % 40);
    for (auto& d : f) d = static_cast<double>(rng() % 20) / 2.0;
    double previous = 1.0;
    for (double x = -1; x <= 11; x += 0.25) {
      double s = Survival(f, x);
      EXPECT_NEAR(s, BruteForceSurvival(f, x), 1e-12);
      EXPECT_LE(s, previous);
      previous = s;
    }
    EXPECT_EQ(Survival(f, *std::max_element(f.begin(), f.end())), 0.0);
  }
}

TEST(TestWindowTest, FlagsOnlyBeyondTheProfile) {
  auto model = HandModel({0, 0, 1, 1, 2}, {{0, 0}});
  auto flagged = TestWindow(model, "A", std::vector<std::int64_t>{2, 0});
  EXPECT_EQ(flagged.d_new, 2.0);
  EXPECT_EQ(flagged.survival, 0.0);
  EXPECT_TRUE(flagged.anomalous);

  auto normal = TestWindow(model, "A", std::vector<std::int64_t>{0, 0});
  EXPECT_EQ(normal.d_new, 0.0);
  EXPECT_EQ(normal.survival, 0.6);
  EXPECT_FALSE(normal.anomalous);

  auto between = TestWindow(model, "A", std::vector<std::int64_t>{1, 1});
  EXPECT_EQ(between.survival, 0.2);
  EXPECT_FALSE(between.anomalous);
  auto beyond = TestWindow(model, "A", std::vector<std::int64_t>{3, 0});
  EXPECT_TRUE(beyond.anomalous);
}

TEST(TestWindowTest, ExactRepeatIsNeverFlagged) {
  auto model = HandModel({0, 0, 0}, {{3, 3}, {3, 3}});
  auto verdict = TestWindow(model, "A", std::vector<std::int64_t>{3, 3});
  EXPECT_EQ(verdict.survival, 0.0);
  EXPECT_FALSE(verdict.anomalous);
  EXPECT_TRUE(TestWindow(model, "A", std::vector<std::int64_t>{3, 4}).anomalous);
}

TEST(TestWindowTest, UnknownEspAndLengthMismatch) {
  auto model = HandModel({0}, {{0, 0}});
  EXPECT_EQ(CodeOf([&] { TestWindow(model, "B", std::vector<std::int64_t>{0, 0}); }),
            ErrorCode::kUnknownEsp);
  EXPECT_EQ(CodeOf([&] { TestWindow(model, "A", std::vector<std::int64_t>{0, 0, 0}); }),
            ErrorCode::kBadConfig);
}

TEST(TestWindowTest, DegenerateProfileIsWhitelist) {
  EfpModel model = BuildEfpModel({{"A", Series({0, 1, 0, 0, 1, 0, 0})}}, 6, 1e-3, At(0),
                                 Millis{60000}, 7);
  ASSERT_TRUE(model.profiles["A"].degenerate);
  auto seen = TestWindow(model, "A", std::vector<std::int64_t>{1, 0, 0, 1, 0, 0});
  EXPECT_EQ(seen.survival, 1.0);
  EXPECT_FALSE(seen.anomalous);
  auto unseen = TestWindow(model, "A", std::vector<std::int64_t>{1, 1, 0, 1, 0, 0});
  EXPECT_EQ(unseen.survival, 0.0);
  EXPECT_TRUE(unseen.anomalous);

  EfpModel tiny = BuildEfpModel({{"A", Series({1, 2})}}, 6, 1e-3, At(0), Millis{60000}, 2);
  auto none = TestWindow(tiny, "A", std::vector<std::int64_t>(6, 0));
  EXPECT_TRUE(std::isnan(none.d_new));
  EXPECT_TRUE(none.anomalous);
}

TEST(UpdateProfileTest, AppendsDistanceAndWindow) {
  auto model = HandModel({0, 1}, {{0, 0}});
  UpdateProfile(model, "A", std::vector<std::int64_t>{1, 1}, 0.5);
  const auto& p = model.profiles["A"];
  EXPECT_EQ(std::vector<double>(p.distances.begin(), p.distances.end()),
            (std::vector<double>{0, 1, 0.5}));
  EXPECT_EQ(p.windows.back(), (CountWindow{1, 1}));
  EXPECT_EQ(p.appended, 1u);
  EXPECT_EQ(CodeOf([&] { UpdateProfile(model, "B", std::vector<std::int64_t>{1, 1}, 0.5); }),
            ErrorCode::kUnknownEsp);
}

TEST(UpdateProfileTest, RetentionCapEvictsOldest) {
  std::vector<std::int64_t> counts(kDefaultProfileRetention + 5);
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] = static_cast<std::int64_t>(i % 7);
  EfpModel model = BuildEfpModel({{"A", Series(counts)}}, 6, 1e-3, At(0), Millis{60000},
                                 static_cast<std::int64_t>(counts.size()));
  auto& p = model.profiles["A"];
  EXPECT_EQ(p.distances.size(), kDefaultProfileRetention);
  EXPECT_EQ(p.windows.size(), kDefaultProfileRetention);
  const double oldest = p.distances[1];
  UpdateProfile(model, "A", std::vector<std::int64_t>(6, 1), 0.25);
  EXPECT_EQ(p.distances.size(), kDefaultProfileRetention);
  EXPECT_EQ(p.windows.size(), kDefaultProfileRetention);
  EXPECT_EQ(p.distances.front(), oldest);
  EXPECT_EQ(p.distances.back(), 0.25);
}

TEST(ContaminationTest, LargerDistancesNeverLowerSurvival) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> f(5 + rng() % 100);
    for (auto& d : f) d = static_cast<double>(rng() % 1000) / 10.0;
    const double d_new = static_cast<double>(rng() % 1000) / 10.0;
    double before = Survival(f, d_new);
    for (int k = 0; k < 20; ++k) {
      f.push_back(d_new + 0.1 + static_cast<double>(rng() % 100));
      double after = Survival(f, d_new);
      EXPECT_GE(after, before);
      before = after;
    }
  }
}

TEST(EfpJsonTest, RoundTripKeepsOnlineState) {
  std::mt19937_64 rng(31);
  std::map<std::string, FrequencySeries> series;
  for (const char* id : {"esp-0001", "esp-0002"}) {
    std::vector<std::int64_t> counts(30);
    for (auto& c : counts) c = static_cast<std::int64_t>(rng() % 5);
    series[id] = Series(counts, id);
  }
  series["esp-0003"] = Series({1, 0, 1}, "esp-0003");
  EfpModel model = BuildEfpModel(series, 6, 1e-3, At(0), Millis{60000}, 30);
  UpdateProfile(model, "esp-0001", std::vector<std::int64_t>{1, 2, 3, 4, 5, 6}, 1.5);
  auto text = EfpToJson(model).dump();
  EfpModel back = EfpFromJson(nlohmann::json::parse(text));
  EXPECT_EQ(EfpToJson(back).dump(), text);
  EXPECT_EQ(back.profiles["esp-0001"].windows, model.profiles["esp-0001"].windows);
  EXPECT_TRUE(back.profiles["esp-0003"].degenerate);
  EXPECT_EQ(back.training_end(), model.training_end());
  for (const auto& [id, p] : model.profiles) {
    auto w = std::vector<std::int64_t>{0, 1, 0, 1, 0, 1};
    auto a = TestWindow(model, id, w);
    auto b = TestWindow(back, id, w);
    EXPECT_EQ(a.survival, b.survival);
    EXPECT_EQ(a.anomalous, b.anomalous);
  }
}

TEST(EfpJsonTest, MinimalDocumentLoads) {
  auto doc = nlohmann::json::parse(R"({"bin":60,"M":2,"alpha":0.001,
    "profiles":{"A":{"origin":"2025-05-19T00:00:00Z","counts":[1,1,1,1],"distances":[0,0]}}})");
  EfpModel model = EfpFromJson(doc);
  EXPECT_EQ(model.profiles["A"].windows.size(), 3u);
  EXPECT_EQ(model.training_bins, 4);
  EXPECT_THROW(EfpFromJson(nlohmann::json::parse(R"({"bin":60,"M":1,"alpha":0.001})")), Error);
  EXPECT_THROW(EfpFromJson(nlohmann::json::parse(R"({"bin":60,"M":6,"alpha":2})")), Error);
}

}  // namespace
}  // namespace eventlens
