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

#ifndef EVENTLENS_EFP_H_
#define EVENTLENS_EFP_H_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eventlens/event.h"
#include "eventlens/time.h"
#include "json.hpp"

namespace eventlens {

// Event Frequency Patterns. Each ESP's binned count series is summarized by
// its distance profile: for every length-M subsequence, the Euclidean
// distance to the nearest subsequence that does not overlap it. No
// normalization is applied, so magnitude differences count.

using CountWindow = std::vector<std::int64_t>;

struct FrequencySeries {
  std::string esp_id;
  TimePoint origin;
  Millis bin{0};
  std::vector<std::int64_t> counts;

  TimePoint end() const { return origin + bin * static_cast<std::int64_t>(counts.size()); }
};

struct LabeledEvent {
  const Event* event;
  std::string esp_id;
};

// One zero-filled series per observed esp over [origin, horizon); the last
// bin may be partial. Events outside the range are ignored.
std::map<std::string, FrequencySeries> BinFrequencies(std::span<const LabeledEvent> labeled,
                                                      TimePoint origin, Millis bin,
                                                      TimePoint horizon);

inline constexpr std::size_t kDefaultProfileRetention = 10000;

struct DistanceProfile {
  std::string esp_id;
  std::size_t m = 0;
  // Training series the profile was built from (kept for persistence).
  FrequencySeries series;
  // f_i. Windows without any non-overlapping partner (possible while
  // len < 3M - 1) have no entry.
  std::deque<double> distances;
  // Every retained length-M window: training windows first, then windows
  // appended online.
  std::deque<CountWindow> windows;
  std::size_t appended = 0;  // online windows at the back of `windows`
  std::size_t evicted = 0;   // training windows dropped from the front
  std::size_t retention = kDefaultProfileRetention;
  // Series shorter than 2M: tested by exact-count whitelist instead.
  bool degenerate = false;
};

// Exact distances over the series. Throws kSeriesTooShort when
// len(counts) < 2M and kBadConfig when m < 1.
DistanceProfile BuildProfile(const FrequencySeries& series, std::size_t m);

// BuildProfile, falling back to a degenerate (whitelist) profile for short
// series.
DistanceProfile MakeProfile(const FrequencySeries& series, std::size_t m,
                            std::size_t retention = kDefaultProfileRetention);

std::vector<CountWindow> SlidingWindows(std::span<const std::int64_t> counts, std::size_t m);

// Minimum Euclidean distance from w_new to any retained window. Throws
// kEmptyProfile and kBadConfig on a length mismatch.
double NearestDistance(const DistanceProfile& profile, std::span<const std::int64_t> w_new);

// 1 - |{d in f : d <= d_new}| / |f|. Throws kEmptyProfile.
double Survival(const DistanceProfile& profile, double d_new);
double Survival(std::span<const double> distances, double d_new);

struct FrequencyVerdict {
  std::string esp_id;
  std::int64_t window_index = 0;
  double d_new = 0;  // NaN when the profile has no windows at all
  double survival = 1;
  bool anomalous = false;
};

struct EfpModel {
  double alpha = 1e-3;
  Millis bin{60000};
  std::size_t m = 6;
  std::size_t retention = kDefaultProfileRetention;
  TimePoint origin;          // start of the training range
  std::int64_t training_bins = 0;
  std::map<std::string, DistanceProfile> profiles;

  TimePoint training_end() const { return origin + bin * training_bins; }
  void Validate() const;
  // Trailing `n` training counts for the esp, zero-padded on the left.
  std::vector<std::int64_t> TrainingTail(const std::string& esp_id, std::size_t n) const;
};

// Profiles for every series. All series must share origin and bin.
EfpModel BuildEfpModel(const std::map<std::string, FrequencySeries>& series, std::size_t m,
                       double alpha, TimePoint origin, Millis bin, std::int64_t training_bins,
                       std::size_t retention = kDefaultProfileRetention);

// anomalous = survival < alpha, except that an exact match of a retained
// window (d_new == 0) is never anomalous. Degenerate profiles report
// survival 1 for a previously seen window and 0 otherwise. Throws
// kUnknownEsp and kBadConfig on a length mismatch.
FrequencyVerdict TestWindow(const EfpModel& model, const std::string& esp_id,
                            std::span<const std::int64_t> w_new, std::int64_t window_index = 0);

// Appends a normal window and its distance, evicting the oldest entries past
// the retention cap. Throws kUnknownEsp.
void UpdateProfile(EfpModel& model, const std::string& esp_id, std::span<const std::int64_t> w_new,
                   double d_new);

nlohmann::json EfpToJson(const EfpModel& model);
EfpModel EfpFromJson(const nlohmann::json& document);

}  // namespace eventlens

#endif  // EVENTLENS_EFP_H_
