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

#ifndef EVENTLENS_PIPELINE_H_
#define EVENTLENS_PIPELINE_H_

#include <span>
#include <vector>

#include "eventlens/config.h"
#include "eventlens/detector.h"
#include "eventlens/efp.h"
#include "eventlens/esp.h"
#include "eventlens/event.h"
#include "eventlens/rcl.h"

namespace eventlens {

struct Models {
  EspSet esps;
  EfpModel efp;
};

// Learns ESPs from the training events, labels them and builds one frequency
// profile per ESP on a bin grid aligned to the epoch. Throws kEmptyTraining.
Models TrainModels(std::span<const Event> events, const Config& config = {});

StreamResult Detect(const Models& models, std::span<const Event> events,
                    const Config& config = {});

LocalizeResult LocalizeVerdicts(std::span<const Event> events,
                                std::span<const WindowVerdict> verdicts,
                                const Config& config = {});

}  // namespace eventlens

#endif  // EVENTLENS_PIPELINE_H_
