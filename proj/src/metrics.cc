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

#include "eventlens/metrics.h"

#include <algorithm>

#include "eventlens/error.h"

namespace eventlens {

DetectionMetrics DetectionScores(const std::vector<bool>& verdicts,
                                 const std::vector<bool>& truth) {
  if (verdicts.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(verdicts.size()) + " verdicts for " +
                                                std::to_string(truth.size()) + " labels");
  }
  DetectionMetrics m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (verdicts[i] && truth[i]) {
      ++m.tp;
    } else if (verdicts[i]) {
      ++m.fp;
    } else if (truth[i]) {
      ++m.fn;
    } else {
      ++m.tn;
    }
  }
  if (m.tp + m.fp == 0) {
    m.precision_degenerate = true;
  } else {
    m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  }
  if (m.tp + m.fn == 0) {
    m.recall_degenerate = true;
  } else {
    m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  }
  if (m.precision + m.recall > 0) {
    m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

double AcAtK(std::span<const RankedCase> cases, int k) {
  if (k < 1) throw Error(ErrorCode::kBadConfig, "k must be >= 1");
  if (cases.empty()) throw Error(ErrorCode::kEmptyTruth, "no ranked cases");
  double sum = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    if (c.truth.empty()) {
      throw Error(ErrorCode::kEmptyTruth, "case has an empty root-cause set",
                  "cases/" + std::to_string(i));
    }
    const auto top = std::min<std::size_t>(static_cast<std::size_t>(k), c.ranking.size());
    std::int64_t hits = 0;
    for (std::size_t j = 0; j < top; ++j) hits += c.truth.contains(c.ranking[j]) ? 1 : 0;
    const auto denominator = std::min<std::size_t>(static_cast<std::size_t>(k), c.truth.size());
    sum += static_cast<double>(hits) / static_cast<double>(denominator);
  }
  return sum / static_cast<double>(cases.size());
}

double AvgAtK(std::span<const RankedCase> cases, int k) {
  if (k < 1) throw Error(ErrorCode::kBadConfig, "k must be >= 1");
  double sum = 0;
  for (int j = 1; j <= k; ++j) sum += AcAtK(cases, j);
  return sum / k;
}

MetricsReport Evaluate(const std::vector<bool>& verdicts, const std::vector<bool>& truth,
                       std::span<const RankedCase> ranked, int max_k) {
  MetricsReport report;
  report.detection = DetectionScores(verdicts, truth);
  if (!ranked.empty()) {
    for (int k = 1; k <= max_k; ++k) {
      report.ac_at[k] = AcAtK(ranked, k);
      report.avg_at[k] = AvgAtK(ranked, k);
    }
  }
  return report;
}

nlohmann::json MetricsToJson(const MetricsReport& report) {
  const auto& d = report.detection;
  nlohmann::json ac = nlohmann::json::object();
  nlohmann::json avg = nlohmann::json::object();
  for (const auto& [k, v] : report.ac_at) ac[std::to_string(k)] = v;
  for (const auto& [k, v] : report.avg_at) avg[std::to_string(k)] = v;
  return {{"tp", d.tp},
          {"fp", d.fp},
          {"fn", d.fn},
          {"tn", d.tn},
          {"precision", d.precision},
          {"recall", d.recall},
          {"f1", d.f1},
          {"precision_degenerate", d.precision_degenerate},
          {"recall_degenerate", d.recall_degenerate},
          {"ac_at", ac},
          {"avg_at", avg}};
}

}  // namespace eventlens
