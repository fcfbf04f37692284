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

#include "eventlens/pipeline.h"

#include "eventlens/error.h"

namespace eventlens {

Models TrainModels(std::span<const Event> events, const Config& config) {
  config.Validate();
  if (events.empty()) throw Error(ErrorCode::kEmptyTraining, "no training events");
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].time < events[i - 1].time) {
      throw Error(ErrorCode::kUnsortedInput, "training events are not time-ordered", {},
                  static_cast<std::int64_t>(i + 1));
    }
  }
  const auto mapping = config.mapping();
  Models models;
  if (config.esp_enabled) {
    models.esps = LearnEsps(events, config.learner(), mapping);
  } else {
    models.esps = EspSet({}, config.learner());
  }

  DetectorOptions options{mapping, config.esp_enabled, config.efp_enabled};
  std::vector<LabeledEvent> labeled;
  labeled.reserve(events.size());
  for (const auto& event : events) {
    if (auto id = LabelEvent(models.esps, event, options)) labeled.push_back({&event, *id});
  }

  const Millis bin = config.bin();
  const TimePoint origin = TimePoint{} + bin * FloorIndex(events.front().time, TimePoint{}, bin);
  const TimePoint horizon = events.back().time + Millis{1};
  const auto training_bins = FloorIndex(horizon - Millis{1}, origin, bin) + 1;
  auto series = BinFrequencies(labeled, origin, bin, origin + bin * training_bins);
  models.efp = BuildEfpModel(series, static_cast<std::size_t>(config.subsequence_length),
                             config.alpha, origin, bin, training_bins,
                             static_cast<std::size_t>(config.profile_retention));
  return models;
}

StreamResult Detect(const Models& models, std::span<const Event> events, const Config& config) {
  config.Validate();
  return RunStream(models.esps, models.efp, events, config.stream());
}

LocalizeResult LocalizeVerdicts(std::span<const Event> events,
                                std::span<const WindowVerdict> verdicts, const Config& config) {
  config.Validate();
  return Localize(events, verdicts, config.walk(), config.extended_window());
}

}  // namespace eventlens
