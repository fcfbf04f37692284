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

#ifndef EVENTLENS_DETECTOR_H_
#define EVENTLENS_DETECTOR_H_

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eventlens/adaptation.h"
#include "eventlens/efp.h"
#include "eventlens/esp.h"
#include "eventlens/event.h"
#include "json.hpp"

namespace eventlens {

enum class ReportKind { kPointwise, kFrequency };

struct AnomalyReport {
  ReportKind kind = ReportKind::kPointwise;
  TimePoint window_start;
  TimePoint window_end;
  // Pointwise: the unmatched event. Frequency: the esp's events in the
  // flagged bin, or in the preceding M-1 bins when the flagged bin is empty.
  std::vector<Event> events;
  std::optional<std::string> esp_id;        // frequency only
  std::optional<std::string> nearest_rule;  // pointwise only
  double d_new = 0;
  double survival = 0;
  double alpha = 0;

  // Latest time a causing intervention can carry: the event time for a
  // pointwise report, the end of the flagged bin for a frequency report.
  TimePoint anomaly_time() const;
};

struct WindowVerdict {
  TimePoint window_start;
  TimePoint window_end;
  bool y = false;
  std::vector<AnomalyReport> reports;
};

// Id every event is labeled with when ESP matching is disabled, so that the
// frequency model covers the whole stream.
inline constexpr const char* kCatchAllEsp = "*";

struct DetectorOptions {
  FieldMapping mapping;
  bool esp_enabled = true;
  bool efp_enabled = true;
};

// The esp id the detector assigns to an event (nullopt: unmatched).
std::optional<std::string> LabelEvent(const EspSet& esps, const Event& event,
                                      const DetectorOptions& options);

// Trailing per-esp bins preceding the window under test.
struct EspHistory {
  std::deque<std::int64_t> counts;
  std::deque<std::vector<Event>> events;  // parallel to counts; may be empty for seeded bins
};
using History = std::map<std::string, EspHistory>;

struct WindowDetection {
  WindowVerdict verdict;
  std::vector<Event> unmatched;
  std::map<std::string, std::vector<Event>> labeled;  // this window's events per esp
  std::vector<FrequencyVerdict> tests;                // every window tested, normal or not
  std::map<std::string, CountWindow> tested_windows;  // w_new per tested esp
};

// Classifies every event and tests each profiled esp whose history holds at
// least M-1 bins. The window must be one bin long.
WindowDetection DetectWindow(const EspSet& esps, const EfpModel& efp, const TimeWindow& window,
                             const History& history, const DetectorOptions& options = {});

// Pushes this window's counts for every profiled esp, keeping M-1 bins.
void AdvanceHistory(History& history, const WindowDetection& detection, const EfpModel& efp);

// History seeded from the last M-1 training bins of every profile.
History SeedHistory(const EfpModel& efp);

struct StreamConfig {
  DetectorOptions detector;
  Millis window{60000};
  bool adaptation = true;
  AdaptationConfig adaptation_config;
};

struct StreamResult {
  std::vector<WindowVerdict> verdicts;
  EspSet esps;
  EfpModel efp;
  std::vector<std::string> promoted;  // ids added by adaptation, in order
};

// Windows start at the EFP training end when the stream follows training
// (history seeded from the training tail); otherwise at the first event's
// bin on the model's grid with an empty history. Empty bins between the
// start and the last event are processed too. Throws kUnsortedInput and
// kBadConfig when the window differs from the EFP bin.
StreamResult RunStream(EspSet esps, EfpModel efp, std::span<const Event> events,
                       const StreamConfig& config = {});

nlohmann::json VerdictToJson(const WindowVerdict& verdict, const FieldMapping& mapping = {});
WindowVerdict VerdictFromJson(const nlohmann::json& object, const FieldMapping& mapping = {});
void WriteVerdicts(std::ostream& out, std::span<const WindowVerdict> verdicts,
                   const FieldMapping& mapping = {});
std::vector<WindowVerdict> ReadVerdicts(std::istream& in, const FieldMapping& mapping = {});

}  // namespace eventlens

#endif  // EVENTLENS_DETECTOR_H_
