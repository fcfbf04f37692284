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

#include <algorithm>
#include <cmath>
#include <limits>

#include "eventlens/error.h"

namespace eventlens {

using nlohmann::json;

std::map<std::string, FrequencySeries> BinFrequencies(std::span<const LabeledEvent> labeled,
                                                      TimePoint origin, Millis bin,
                                                      TimePoint horizon) {
  if (bin.count() <= 0) throw Error(ErrorCode::kBadConfig, "bin must be positive");
  std::int64_t bins = 0;
  if (horizon > origin) bins = ((horizon - origin).count() + bin.count() - 1) / bin.count();
  std::map<std::string, FrequencySeries> out;
  for (const auto& item : labeled) {
    if (item.event->time < origin || item.event->time >= horizon) continue;
    auto it = out.find(item.esp_id);
    if (it == out.end()) {
      it = out.emplace(item.esp_id, FrequencySeries{item.esp_id, origin, bin,
                                                    std::vector<std::int64_t>(bins, 0)})
               .first;
    }
    ++it->second.counts[FloorIndex(item.event->time, origin, bin)];
  }
  return out;
}

std::vector<CountWindow> SlidingWindows(std::span<const std::int64_t> counts, std::size_t m) {
  std::vector<CountWindow> out;
  if (m == 0 || counts.size() < m) return out;
  out.reserve(counts.size() - m + 1);
  for (std::size_t u = 0; u + m <= counts.size(); ++u) {
    out.emplace_back(counts.begin() + u, counts.begin() + u + m);
  }
  return out;
}

DistanceProfile BuildProfile(const FrequencySeries& series, std::size_t m) {
  if (m < 1) throw Error(ErrorCode::kBadConfig, "subsequence length must be >= 1");
  const auto& x = series.counts;
  if (x.size() < 2 * m) {
    throw Error(ErrorCode::kSeriesTooShort,
                "series of length " + std::to_string(x.size()) + " is shorter than 2M = " +
                    std::to_string(2 * m),
                series.esp_id);
  }
  const std::size_t n = x.size() - m + 1;
  constexpr auto kNone = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> best(n, kNone);

  // Walk each diagonal v = u + k (k >= M) once, updating the squared distance
  // incrementally. Integer arithmetic keeps every value exact.
  for (std::size_t k = m; k < n; ++k) {
    std::int64_t sq = 0;
    for (std::size_t j = 0; j < m; ++j) {
      std::int64_t diff = x[j] - x[k + j];
      sq += diff * diff;
    }
    for (std::size_t u = 0;; ++u) {
      best[u] = std::min(best[u], sq);
      best[u + k] = std::min(best[u + k], sq);
      if (u + k + 1 >= n) break;
      std::int64_t out_diff = x[u] - x[u + k];
      std::int64_t in_diff = x[u + m] - x[u + m + k];
      sq += in_diff * in_diff - out_diff * out_diff;
    }
  }

  DistanceProfile profile;
  profile.esp_id = series.esp_id;
  profile.m = m;
  profile.series = series;
  for (auto sq : best) {
    if (sq != kNone) profile.distances.push_back(std::sqrt(static_cast<double>(sq)));
  }
  auto windows = SlidingWindows(x, m);
  profile.windows.assign(std::make_move_iterator(windows.begin()),
                         std::make_move_iterator(windows.end()));
  return profile;
}

namespace {

void EnforceRetention(DistanceProfile& profile) {
  while (profile.windows.size() > profile.retention) {
    profile.windows.pop_front();
    if (profile.windows.size() + 1 > profile.appended) {
      ++profile.evicted;
    } else {
      --profile.appended;
    }
  }
  while (profile.distances.size() > profile.retention) profile.distances.pop_front();
}

}  // namespace

DistanceProfile MakeProfile(const FrequencySeries& series, std::size_t m, std::size_t retention) {
  DistanceProfile profile;
  if (series.counts.size() < 2 * m) {
    profile.esp_id = series.esp_id;
    profile.m = m;
    profile.series = series;
    profile.degenerate = true;
    auto windows = SlidingWindows(series.counts, m);
    profile.windows.assign(windows.begin(), windows.end());
  } else {
    profile = BuildProfile(series, m);
  }
  profile.retention = retention;
  EnforceRetention(profile);
  return profile;
}

double NearestDistance(const DistanceProfile& profile, std::span<const std::int64_t> w_new) {
  if (profile.windows.empty()) {
    throw Error(ErrorCode::kEmptyProfile, "profile has no windows", profile.esp_id);
  }
  if (w_new.size() != profile.m) {
    throw Error(ErrorCode::kBadConfig, "window length does not match M", profile.esp_id);
  }
  auto best = std::numeric_limits<std::int64_t>::max();
  for (const auto& w : profile.windows) {
    std::int64_t sq = 0;
    for (std::size_t j = 0; j < w.size() && sq < best; ++j) {
      std::int64_t diff = w[j] - w_new[j];
      sq += diff * diff;
    }
    best = std::min(best, sq);
    if (best == 0) break;
  }
  return std::sqrt(static_cast<double>(best));
}

double Survival(std::span<const double> distances, double d_new) {
  if (distances.empty()) throw Error(ErrorCode::kEmptyProfile, "distance profile is empty");
  auto at_most = std::count_if(distances.begin(), distances.end(),
                               [d_new](double d) { return d <= d_new; });
  const auto n = static_cast<double>(distances.size());
  return static_cast<double>(static_cast<std::int64_t>(distances.size()) - at_most) / n;
}

double Survival(const DistanceProfile& profile, double d_new) {
  if (profile.distances.empty()) {
    throw Error(ErrorCode::kEmptyProfile, "distance profile is empty", profile.esp_id);
  }
  std::vector<double> values(profile.distances.begin(), profile.distances.end());
  return Survival(std::span<const double>(values), d_new);
}

void EfpModel::Validate() const {
  if (!(alpha > 0 && alpha < 1)) throw Error(ErrorCode::kBadConfig, "alpha must be in (0, 1)");
  if (m < 2) throw Error(ErrorCode::kBadConfig, "M must be >= 2");
  if (bin.count() <= 0) throw Error(ErrorCode::kBadConfig, "bin must be positive");
  if (retention < 1) throw Error(ErrorCode::kBadConfig, "profile retention must be >= 1");
}

std::vector<std::int64_t> EfpModel::TrainingTail(const std::string& esp_id, std::size_t n) const {
  std::vector<std::int64_t> tail(n, 0);
  auto it = profiles.find(esp_id);
  if (it == profiles.end()) return tail;
  const auto& counts = it->second.series.counts;
  std::size_t take = std::min(n, counts.size());
  std::copy(counts.end() - static_cast<std::ptrdiff_t>(take), counts.end(),
            tail.end() - static_cast<std::ptrdiff_t>(take));
  return tail;
}

EfpModel BuildEfpModel(const std::map<std::string, FrequencySeries>& series, std::size_t m,
                       double alpha, TimePoint origin, Millis bin, std::int64_t training_bins,
                       std::size_t retention) {
  EfpModel model;
  model.alpha = alpha;
  model.bin = bin;
  model.m = m;
  model.retention = retention;
  model.origin = origin;
  model.training_bins = training_bins;
  model.Validate();
  for (const auto& [id, s] : series) {
    if (s.origin != origin || s.bin != bin) {
      throw Error(ErrorCode::kBadConfig, "series grid differs from the model grid", id);
    }
    model.profiles.emplace(id, MakeProfile(s, m, retention));
  }
  return model;
}

FrequencyVerdict TestWindow(const EfpModel& model, const std::string& esp_id,
                            std::span<const std::int64_t> w_new, std::int64_t window_index) {
  auto it = model.profiles.find(esp_id);
  if (it == model.profiles.end()) {
    throw Error(ErrorCode::kUnknownEsp, "no frequency profile for esp", esp_id);
  }
  const auto& profile = it->second;
  if (w_new.size() != model.m) {
    throw Error(ErrorCode::kBadConfig, "window length does not match M", esp_id);
  }
  FrequencyVerdict verdict;
  verdict.esp_id = esp_id;
  verdict.window_index = window_index;
  if (profile.degenerate) {
    bool seen = false;
    if (profile.windows.empty()) {
      verdict.d_new = std::numeric_limits<double>::quiet_NaN();
    } else {
      verdict.d_new = NearestDistance(profile, w_new);
      seen = verdict.d_new == 0.0;
    }
    verdict.survival = seen ? 1.0 : 0.0;
    verdict.anomalous = !seen;
    return verdict;
  }
  verdict.d_new = NearestDistance(profile, w_new);
  verdict.survival = Survival(profile, verdict.d_new);
  verdict.anomalous = verdict.survival < model.alpha && verdict.d_new > 0.0;
  return verdict;
}

void UpdateProfile(EfpModel& model, const std::string& esp_id, std::span<const std::int64_t> w_new,
                   double d_new) {
  auto it = model.profiles.find(esp_id);
  if (it == model.profiles.end()) {
    throw Error(ErrorCode::kUnknownEsp, "no frequency profile for esp", esp_id);
  }
  auto& profile = it->second;
  profile.windows.emplace_back(w_new.begin(), w_new.end());
  ++profile.appended;
  if (!profile.degenerate && std::isfinite(d_new)) profile.distances.push_back(d_new);
  EnforceRetention(profile);
}

namespace {

json BinSeconds(Millis bin) {
  if (bin.count() % 1000 == 0) return bin.count() / 1000;
  return static_cast<double>(bin.count()) / 1000.0;
}

Millis BinFromJson(const json& value) {
  if (!value.is_number()) throw Error(ErrorCode::kSchemaError, "bin must be a number", "bin");
  auto ms = static_cast<std::int64_t>(std::llround(value.get<double>() * 1000.0));
  if (ms <= 0) throw Error(ErrorCode::kSchemaError, "bin must be positive", "bin");
  return Millis{ms};
}

template <typename T>
T Required(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw Error(ErrorCode::kSchemaError, "missing key '" + std::string(key) + "'", where + "/" + key);
  }
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, e.what(), where + "/" + key);
  }
}

}  // namespace

json EfpToJson(const EfpModel& model) {
  json profiles = json::object();
  for (const auto& [id, profile] : model.profiles) {
    json entry;
    entry["origin"] = FormatTime(profile.series.origin);
    entry["counts"] = profile.series.counts;
    entry["distances"] = std::vector<double>(profile.distances.begin(), profile.distances.end());
    if (profile.appended > 0) {
      json appended = json::array();
      for (std::size_t i = profile.windows.size() - profile.appended; i < profile.windows.size(); ++i) {
        appended.push_back(profile.windows[i]);
      }
      entry["appended_windows"] = appended;
    }
    if (profile.evicted > 0) entry["evicted_windows"] = profile.evicted;
    profiles[id] = entry;
  }
  json out;
  out["bin"] = BinSeconds(model.bin);
  out["M"] = model.m;
  out["alpha"] = model.alpha;
  out["origin"] = FormatTime(model.origin);
  out["training_bins"] = model.training_bins;
  out["retention"] = model.retention;
  out["profiles"] = profiles;
  return out;
}

EfpModel EfpFromJson(const json& document) {
  if (!document.is_object()) throw Error(ErrorCode::kSchemaError, "EFP model must be an object");
  EfpModel model;
  model.bin = BinFromJson(document.value("bin", json(60)));
  model.m = Required<std::size_t>(document, "M", "");
  model.alpha = Required<double>(document, "alpha", "");
  model.retention = document.value("retention", kDefaultProfileRetention);
  model.Validate();
  const auto& profiles = document.value("profiles", json::object());
  std::optional<TimePoint> origin;
  if (document.contains("origin")) origin = ParseTime(Required<std::string>(document, "origin", ""));
  std::int64_t bins = document.value("training_bins", std::int64_t{-1});

  for (const auto& [id, entry] : profiles.items()) {
    const std::string where = "/profiles/" + id;
    FrequencySeries series;
    series.esp_id = id;
    series.origin = ParseTime(Required<std::string>(entry, "origin", where));
    series.bin = model.bin;
    series.counts = Required<std::vector<std::int64_t>>(entry, "counts", where);
    if (!origin) origin = series.origin;
    if (bins < 0) bins = static_cast<std::int64_t>(series.counts.size());

    DistanceProfile profile;
    profile.esp_id = id;
    profile.m = model.m;
    profile.retention = model.retention;
    profile.degenerate = series.counts.size() < 2 * model.m;
    auto distances = Required<std::vector<double>>(entry, "distances", where);
    profile.distances.assign(distances.begin(), distances.end());
    profile.evicted = entry.value("evicted_windows", std::size_t{0});
    auto windows = SlidingWindows(series.counts, model.m);
    for (std::size_t i = std::min(profile.evicted, windows.size()); i < windows.size(); ++i) {
      profile.windows.push_back(std::move(windows[i]));
    }
    if (entry.contains("appended_windows")) {
      for (const auto& w : entry["appended_windows"]) {
        auto window = w.get<CountWindow>();
        if (window.size() != model.m) {
          throw Error(ErrorCode::kSchemaError, "appended window length differs from M", where);
        }
        profile.windows.push_back(std::move(window));
        ++profile.appended;
      }
    }
    profile.series = std::move(series);
    model.profiles.emplace(id, std::move(profile));
  }
  model.origin = origin.value_or(TimePoint{});
  model.training_bins = std::max<std::int64_t>(bins, 0);
  return model;
}

}  // namespace eventlens
