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

#include "eventlens/detector.h"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "eventlens/error.h"

namespace eventlens {

using nlohmann::json;

TimePoint AnomalyReport::anomaly_time() const {
  if (kind == ReportKind::kPointwise && !events.empty()) return events.front().time;
  return window_end;
}

std::optional<std::string> LabelEvent(const EspSet& esps, const Event& event,
                                      const DetectorOptions& options) {
  if (!options.esp_enabled) return std::string(kCatchAllEsp);
  const EspRule* rule = esps.Match(event, options.mapping);
  if (rule == nullptr) return std::nullopt;
  return rule->id();
}

WindowDetection DetectWindow(const EspSet& esps, const EfpModel& efp, const TimeWindow& window,
                             const History& history, const DetectorOptions& options) {
  WindowDetection detection;
  auto& verdict = detection.verdict;
  verdict.window_start = window.start;
  verdict.window_end = window.end();

  for (const auto& event : window.events) {
    auto label = LabelEvent(esps, event, options);
    if (label) {
      detection.labeled[*label].push_back(event);
      continue;
    }
    detection.unmatched.push_back(event);
    AnomalyReport report;
    report.kind = ReportKind::kPointwise;
    report.window_start = window.start;
    report.window_end = window.end();
    report.events.push_back(event);
    if (const EspRule* miss = esps.NearestMiss(event, options.mapping)) {
      report.nearest_rule = miss->id();
    }
    verdict.reports.push_back(std::move(report));
  }

  if (options.efp_enabled) {
    if (window.duration != efp.bin) {
      throw Error(ErrorCode::kBadConfig, "detection window must equal the EFP bin");
    }
    const std::size_t need = efp.m - 1;
    const auto index = FloorIndex(window.start, efp.origin, efp.bin);
    for (const auto& [id, profile] : efp.profiles) {
      auto past = history.find(id);
      if (need > 0 && (past == history.end() || past->second.counts.size() < need)) continue;
      CountWindow w_new;
      w_new.reserve(efp.m);
      if (need > 0) w_new.assign(past->second.counts.end() - need, past->second.counts.end());
      auto here = detection.labeled.find(id);
      w_new.push_back(here == detection.labeled.end()
                          ? 0
                          : static_cast<std::int64_t>(here->second.size()));

      auto test = TestWindow(efp, id, w_new, index);
      if (test.anomalous) {
        AnomalyReport report;
        report.kind = ReportKind::kFrequency;
        report.window_start = window.start;
        report.window_end = window.end();
        report.esp_id = id;
        report.d_new = test.d_new;
        report.survival = test.survival;
        report.alpha = efp.alpha;
        if (here != detection.labeled.end()) {
          report.events = here->second;
        } else if (need > 0) {
          const auto& recent = past->second.events;
          for (auto it = recent.end() - std::min(need, recent.size()); it != recent.end(); ++it) {
            report.events.insert(report.events.end(), it->begin(), it->end());
          }
        }
        verdict.reports.push_back(std::move(report));
      }
      detection.tested_windows.emplace(id, std::move(w_new));
      detection.tests.push_back(std::move(test));
    }
  }
  verdict.y = !verdict.reports.empty();
  return detection;
}

void AdvanceHistory(History& history, const WindowDetection& detection, const EfpModel& efp) {
  const std::size_t keep = efp.m > 0 ? efp.m - 1 : 0;
  for (const auto& [id, profile] : efp.profiles) {
    auto& past = history[id];
    auto here = detection.labeled.find(id);
    if (here == detection.labeled.end()) {
      past.counts.push_back(0);
      past.events.emplace_back();
    } else {
      past.counts.push_back(static_cast<std::int64_t>(here->second.size()));
      past.events.push_back(here->second);
    }
    while (past.counts.size() > keep) {
      past.counts.pop_front();
      past.events.pop_front();
    }
  }
}

History SeedHistory(const EfpModel& efp) {
  History history;
  const std::size_t keep = efp.m > 0 ? efp.m - 1 : 0;
  for (const auto& [id, profile] : efp.profiles) {
    auto tail = efp.TrainingTail(id, keep);
    auto& past = history[id];
    past.counts.assign(tail.begin(), tail.end());
    past.events.resize(keep);
  }
  return history;
}

StreamResult RunStream(EspSet esps, EfpModel efp, std::span<const Event> events,
                       const StreamConfig& config) {
  const auto& options = config.detector;
  if (config.window.count() <= 0) throw Error(ErrorCode::kBadConfig, "window must be positive");
  if (options.efp_enabled && config.window != efp.bin) {
    throw Error(ErrorCode::kBadConfig, "detection window must equal the EFP bin");
  }
  if (config.adaptation) config.adaptation_config.Validate();

  StreamResult result;
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].time < events[i - 1].time) {
      throw Error(ErrorCode::kUnsortedInput,
                  "event time " + FormatTime(events[i].time) + " precedes " +
                      FormatTime(events[i - 1].time),
                  {}, static_cast<std::int64_t>(i + 1));
    }
  }
  if (events.empty()) {
    result.esps = std::move(esps);
    result.efp = std::move(efp);
    return result;
  }

  History history;
  TimePoint start;
  if (efp.training_bins > 0 && events.front().time >= efp.training_end()) {
    start = efp.training_end();
    if (options.efp_enabled) history = SeedHistory(efp);
  } else {
    start = efp.origin + config.window * FloorIndex(events.front().time, efp.origin, config.window);
  }

  AdaptationState adaptation{config.adaptation_config, {}};
  std::size_t next = 0;
  for (TimePoint window_start = start; next < events.size(); window_start += config.window) {
    TimeWindow window{window_start, config.window, {}};
    while (next < events.size() && events[next].time < window.end()) {
      window.events.push_back(events[next++]);
    }
    auto detection = DetectWindow(esps, efp, window, history, options);

    if (config.adaptation) {
      if (options.esp_enabled) {
        auto promotions = RecordUnmatched(adaptation, window, detection.unmatched, options.mapping);
        if (!promotions.empty()) {
          auto added = ApplyPromotions(esps, promotions, esps.learner_config(), options.mapping);
          result.promoted.insert(result.promoted.end(), added.begin(), added.end());
        }
      }
      for (const auto& test : detection.tests) {
        if (test.anomalous || !std::isfinite(test.d_new)) continue;
        UpdateProfile(efp, test.esp_id, detection.tested_windows.at(test.esp_id), test.d_new);
      }
    }
    if (options.efp_enabled) AdvanceHistory(history, detection, efp);
    result.verdicts.push_back(std::move(detection.verdict));
  }
  result.esps = std::move(esps);
  result.efp = std::move(efp);
  return result;
}

namespace {

json NumberOrNull(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

const json& Field(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw Error(ErrorCode::kSchemaError, "missing key '" + std::string(key) + "'", where + "/" + key);
  }
  return *it;
}

TimePoint TimeField(const json& object, const char* key, const std::string& where) {
  const auto& value = Field(object, key, where);
  if (!value.is_string()) {
    throw Error(ErrorCode::kSchemaError, "expected a timestamp string", where + "/" + key);
  }
  return ParseTime(value.get<std::string>());
}

double RealField(const json& object, const char* key, const std::string& where) {
  const auto& value = Field(object, key, where);
  if (value.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!value.is_number()) throw Error(ErrorCode::kSchemaError, "expected a number", where + "/" + key);
  return value.get<double>();
}

}  // namespace

json VerdictToJson(const WindowVerdict& verdict, const FieldMapping& mapping) {
  json reports = json::array();
  for (const auto& report : verdict.reports) {
    json entry;
    entry["kind"] = report.kind == ReportKind::kPointwise ? "pointwise" : "frequency";
    entry["window_start"] = FormatTime(report.window_start);
    entry["window_end"] = FormatTime(report.window_end);
    entry["esp_id"] = report.esp_id ? json(*report.esp_id) : json(nullptr);
    json events = json::array();
    for (const auto& event : report.events) events.push_back(EventToJson(event, mapping));
    entry["events"] = std::move(events);
    if (report.kind == ReportKind::kPointwise) {
      entry["evidence"] = {{"nearest_rule", report.nearest_rule ? json(*report.nearest_rule)
                                                                : json(nullptr)}};
    } else {
      entry["evidence"] = {{"d_new", NumberOrNull(report.d_new)},
                           {"survival", report.survival},
                           {"alpha", report.alpha}};
    }
    reports.push_back(std::move(entry));
  }
  json out;
  out["window_start"] = FormatTime(verdict.window_start);
  out["window_end"] = FormatTime(verdict.window_end);
  out["y"] = verdict.y ? 1 : 0;
  out["reports"] = std::move(reports);
  return out;
}

WindowVerdict VerdictFromJson(const json& object, const FieldMapping& mapping) {
  if (!object.is_object()) throw Error(ErrorCode::kSchemaError, "verdict must be an object");
  WindowVerdict verdict;
  verdict.window_start = TimeField(object, "window_start", "");
  verdict.window_end = TimeField(object, "window_end", "");
  const auto& y = Field(object, "y", "");
  if (y.is_boolean()) {
    verdict.y = y.get<bool>();
  } else if (y.is_number_integer() && (y == 0 || y == 1)) {
    verdict.y = y.get<int>() == 1;
  } else {
    throw Error(ErrorCode::kSchemaError, "y must be 0 or 1", "/y");
  }
  const auto& reports = Field(object, "reports", "");
  if (!reports.is_array()) throw Error(ErrorCode::kSchemaError, "reports must be an array", "/reports");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& entry = reports[i];
    const std::string where = "/reports/" + std::to_string(i);
    if (!entry.is_object()) throw Error(ErrorCode::kSchemaError, "report must be an object", where);
    AnomalyReport report;
    const auto& kind = Field(entry, "kind", where);
    if (kind == "pointwise") {
      report.kind = ReportKind::kPointwise;
    } else if (kind == "frequency") {
      report.kind = ReportKind::kFrequency;
    } else {
      throw Error(ErrorCode::kSchemaError, "unknown report kind", where + "/kind");
    }
    report.window_start = entry.contains("window_start") ? TimeField(entry, "window_start", where)
                                                          : verdict.window_start;
    report.window_end = entry.contains("window_end") ? TimeField(entry, "window_end", where)
                                                      : verdict.window_end;
    if (entry.contains("esp_id") && entry["esp_id"].is_string()) {
      report.esp_id = entry["esp_id"].get<std::string>();
    }
    const auto& events = Field(entry, "events", where);
    if (!events.is_array()) throw Error(ErrorCode::kSchemaError, "events must be an array", where + "/events");
    for (const auto& event : events) report.events.push_back(EventFromJson(event, mapping));
    const auto& evidence = Field(entry, "evidence", where);
    if (report.kind == ReportKind::kPointwise) {
      if (evidence.contains("nearest_rule") && evidence["nearest_rule"].is_string()) {
        report.nearest_rule = evidence["nearest_rule"].get<std::string>();
      }
    } else {
      if (!report.esp_id) throw Error(ErrorCode::kSchemaError, "frequency report needs esp_id", where);
      report.d_new = RealField(evidence, "d_new", where + "/evidence");
      report.survival = RealField(evidence, "survival", where + "/evidence");
      report.alpha = RealField(evidence, "alpha", where + "/evidence");
    }
    verdict.reports.push_back(std::move(report));
  }
  return verdict;
}

void WriteVerdicts(std::ostream& out, std::span<const WindowVerdict> verdicts,
                   const FieldMapping& mapping) {
  for (const auto& verdict : verdicts) out << VerdictToJson(verdict, mapping).dump() << '\n';
}

std::vector<WindowVerdict> ReadVerdicts(std::istream& in, const FieldMapping& mapping) {
  std::vector<WindowVerdict> out;
  std::string line;
  std::int64_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kMalformedJson, e.what(), {}, number);
    }
    try {
      out.push_back(VerdictFromJson(object, mapping));
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), e.path(), number);
    }
  }
  return out;
}

}  // namespace eventlens
