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

#ifndef EVENTLENS_METRICS_H_
#define EVENTLENS_METRICS_H_

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace eventlens {

struct DetectionMetrics {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  // A 0/0 ratio is reported as 0 with its flag set.
  bool precision_degenerate = false;
  bool recall_degenerate = false;
};

// Throws kLengthMismatch.
DetectionMetrics DetectionScores(const std::vector<bool>& verdicts, const std::vector<bool>& truth);

struct RankedCase {
  std::vector<std::string> ranking;
  std::set<std::string> truth;
};

// Mean over cases of |top-k hits| / min(k, |truth|). Throws kEmptyTruth when
// a truth set (or the case list) is empty and kBadConfig when k < 1.
double AcAtK(std::span<const RankedCase> cases, int k);
// Mean of AC@1..AC@k.
double AvgAtK(std::span<const RankedCase> cases, int k);

struct MetricsReport {
  DetectionMetrics detection;
  std::map<int, double> ac_at;
  std::map<int, double> avg_at;
};

// AC@k and Avg@k for k in 1..max_k; left empty when there are no ranked
// cases.
MetricsReport Evaluate(const std::vector<bool>& verdicts, const std::vector<bool>& truth,
                       std::span<const RankedCase> ranked, int max_k = 5);

nlohmann::json MetricsToJson(const MetricsReport& report);

}  // namespace eventlens

#endif  // EVENTLENS_METRICS_H_
