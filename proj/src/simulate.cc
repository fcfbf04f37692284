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

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>
#include <tuple>

#include "eventlens/error.h"

namespace eventlens {

namespace {

constexpr std::array<const char*, 6> kOperations = {
    "GetObject", "PutObject", "DescribeInstances", "UpdateInstances", "SendMessage",
    "InvokeFunction"};
constexpr std::array<const char*, 6> kServices = {"s3", "s3", "ec2", "ec2", "sqs", "lambda"};
constexpr std::array<const char*, 3> kRegions = {"us-east-1", "us-east-2", "us-west-2"};
constexpr std::array<int, 5> kPeriods = {1, 2, 3, 4, 6};
constexpr int kSecrets = 8;
constexpr const char* kUnusualRegion = "ap-southeast-3";

std::string ActorName(int a) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "svc-%02d", a);
  return buf;
}

std::string ResourceName(int r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "res-%03d", r);
  return buf;
}

std::string SecretName(int s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "secret-%02d", s);
  return buf;
}

std::uint64_t Mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::int64_t Uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

int OperationOf(int actor, int slot) {
  const int first = actor % 6;
  if (slot == 0) return first;
  return (first + 1 + (actor / 6) % 5) % 6;
}

Event MakeEvent(const std::string& actor, int op, std::vector<std::string> resources, TimePoint t,
                const std::string& region) {
  Event e;
  e.actor = actor;
  e.operation = kOperations[op];
  e.resources = std::move(resources);
  e.time = t;
  e.extras["api.service.name"] = std::string(kServices[op]);
  e.extras["cloud.region"] = region;
  e.extras["error"] = nullptr;
  return e;
}

struct Schedule {
  int actor;
  int op;
  int period;
  int phase;
  int count;
};

void SortEvents(std::vector<Event>& events) {
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return std::tie(a.time, a.actor, a.operation, a.resources) <
           std::tie(b.time, b.actor, b.operation, b.resources);
  });
}

}  // namespace

std::string_view IncidentKindName(IncidentKind kind) {
  switch (kind) {
    case IncidentKind::kNone:
      return "none";
    case IncidentKind::kDoS:
      return "dos";
    case IncidentKind::kSecretDeactivation:
      return "secret";
    case IncidentKind::kUnusualActivity:
      return "unusual";
  }
  return "none";
}

IncidentKind ParseIncidentKind(std::string_view name) {
  if (name == "none") return IncidentKind::kNone;
  if (name == "dos") return IncidentKind::kDoS;
  if (name == "secret" || name == "secret_deactivation") return IncidentKind::kSecretDeactivation;
  if (name == "unusual" || name == "unusual_activity") return IncidentKind::kUnusualActivity;
  throw Error(ErrorCode::kBadConfig, "unknown incident kind '" + std::string(name) + "'", "kind");
}

void SimulationScale::Validate() const {
  if (actors < 10) throw Error(ErrorCode::kBadScale, "need at least 10 actors", "actors");
  if (resources < actors) {
    throw Error(ErrorCode::kBadScale, "need at least one resource per actor", "resources");
  }
  if (bin.count() <= 0) throw Error(ErrorCode::kBadScale, "bin must be positive", "bin");
  if (train.count() % bin.count() != 0 || test.count() % bin.count() != 0) {
    throw Error(ErrorCode::kBadScale, "durations must be whole bins");
  }
  if (train / bin < 1) throw Error(ErrorCode::kBadScale, "training needs at least one bin", "train");
  if (test / bin < 12) throw Error(ErrorCode::kBadScale, "test needs at least 12 bins", "test");
}

nlohmann::json TruthToJson(const GroundTruth& truth) {
  return {{"kind", IncidentKindName(truth.kind)},
          {"seed", truth.seed},
          {"label", truth.label},
          {"root_causes", truth.root_causes}};
}

GroundTruth TruthFromJson(const nlohmann::json& document) {
  GroundTruth truth;
  try {
    truth.kind = ParseIncidentKind(document.value("kind", std::string("none")));
    truth.seed = document.value("seed", std::uint64_t{0});
    truth.label = document.at("label").get<bool>();
    truth.root_causes = document.value("root_causes", std::set<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, e.what(), "truth");
  }
  if (!truth.label && !truth.root_causes.empty()) {
    throw Error(ErrorCode::kSchemaError, "a normal case cannot have root causes", "root_causes");
  }
  return truth;
}

SyntheticCase Simulate(IncidentKind kind, std::uint64_t seed, const SimulationScale& scale) {
  scale.Validate();
  const std::int64_t bin_ms = scale.bin.count();
  const std::int64_t train_bins = scale.train / scale.bin;
  const std::int64_t total_bins = train_bins + scale.test / scale.bin;
  const int per_actor = scale.resources / scale.actors;

  std::mt19937_64 rng(Mix(seed));
  std::vector<Schedule> schedules;
  for (int a = 0; a < scale.actors; ++a) {
    for (int slot = 0; slot < 2; ++slot) {
      Schedule s{a, OperationOf(a, slot), 1, 0, 1};
      // One every-bin schedule keeps each bin populated.
      if (a != 0 || slot != 0) s.period = kPeriods[Uniform(rng, 0, kPeriods.size() - 1)];
      s.phase = static_cast<int>(Uniform(rng, 0, s.period - 1));
      s.count = static_cast<int>(Uniform(rng, 1, 2));
      schedules.push_back(s);
    }
  }

  SyntheticCase out;
  out.kind = kind;
  out.seed = seed;
  std::vector<int> cursor(scale.actors, 0);
  for (std::int64_t b = 0; b < total_bins; ++b) {
    const TimePoint bin_start = scale.origin + scale.bin * b;
    for (const auto& s : schedules) {
      if ((b - s.phase) % s.period != 0) continue;
      for (int c = 0; c < s.count; ++c) {
        const int r = s.actor * per_actor + cursor[s.actor]++ % per_actor;
        Event e = MakeEvent(ActorName(s.actor), s.op, {ResourceName(r)},
                            bin_start + Millis{Uniform(rng, 0, bin_ms - 1)},
                            kRegions[s.actor % kRegions.size()]);
        (b < train_bins ? out.train_events : out.test_events).push_back(std::move(e));
      }
    }
  }

  std::mt19937_64 incident(Mix(seed ^ Mix(static_cast<std::uint64_t>(kind) + 1)));
  const std::int64_t test_bins = total_bins - train_bins;
  const std::int64_t lo = test_bins / 4;
  const std::int64_t hi = std::max(lo, test_bins * 3 / 4 - 5);
  const std::int64_t start_bin = train_bins + Uniform(incident, lo, hi);
  const TimePoint t0 = scale.origin + scale.bin * start_bin;
  out.truth.kind = kind;
  out.truth.seed = seed;
  out.truth.label = kind != IncidentKind::kNone;

  switch (kind) {
    case IncidentKind::kNone:
      break;
    case IncidentKind::kDoS: {
      const int flooder = static_cast<int>(Uniform(incident, 0, scale.actors - 1));
      const int op = OperationOf(flooder, 0);
      std::vector<std::int64_t> per_bin(train_bins, 0);
      for (const auto& e : out.train_events) {
        if (e.operation == kOperations[op]) ++per_bin[FloorIndex(e.time, scale.origin, scale.bin)];
      }
      std::nth_element(per_bin.begin(), per_bin.begin() + per_bin.size() / 2, per_bin.end());
      const std::int64_t median = std::max<std::int64_t>(per_bin[per_bin.size() / 2], 1);
      const std::int64_t bins = Uniform(incident, 3, 5);
      for (std::int64_t b = 0; b < bins; ++b) {
        const std::int64_t count = 50 * median + Uniform(incident, 0, 10);
        for (std::int64_t c = 0; c < count; ++c) {
          const int r = flooder * per_actor + static_cast<int>(c % per_actor);
          out.test_events.push_back(MakeEvent(ActorName(flooder), op, {ResourceName(r)},
                                              t0 + scale.bin * b + Millis{Uniform(incident, 0, bin_ms - 1)},
                                              kRegions[flooder % kRegions.size()]));
        }
      }
      out.truth.root_causes.insert(ActorName(flooder));
      break;
    }
    case IncidentKind::kSecretDeactivation: {
      const int owner = static_cast<int>(Uniform(incident, 0, scale.actors - 1));
      const std::string secret = SecretName(static_cast<int>(Uniform(incident, 0, kSecrets - 1)));
      const TimePoint t_disable = t0 + Millis{Uniform(incident, 0, bin_ms - 1)};
      Event disable = MakeEvent(ActorName(owner), 0, {secret}, t_disable,
                                kRegions[owner % kRegions.size()]);
      disable.operation = "DisableSecret";
      disable.extras["api.service.name"] = std::string("secretsmanager");
      out.test_events.push_back(std::move(disable));

      std::vector<int> others;
      for (int a = 0; a < scale.actors; ++a) {
        if (a != owner) others.push_back(a);
      }
      std::shuffle(others.begin(), others.end(), incident);
      const auto dependents = Uniform(incident, 4, 8);
      std::set<std::int64_t> offsets;
      while (static_cast<std::int64_t>(offsets.size()) < dependents) {
        offsets.insert(Uniform(incident, 30 * 1000, 10 * 60 * 1000));
      }
      auto offset = offsets.begin();
      for (std::int64_t d = 0; d < dependents; ++d, ++offset) {
        const int a = others[d];
        Event read = MakeEvent(ActorName(a), 0, {secret}, t_disable + Millis{*offset},
                               kRegions[a % kRegions.size()]);
        read.operation = "GetSecretValue";
        read.extras["api.service.name"] = std::string("secretsmanager");
        read.extras["error"] = std::string("AccessDeniedException");
        out.test_events.push_back(std::move(read));
      }
      out.truth.root_causes.insert(ActorName(owner));
      break;
    }
    case IncidentKind::kUnusualActivity: {
      const int actor = static_cast<int>(Uniform(incident, 0, scale.actors - 1));
      char id[32];
      std::snprintf(id, sizeof(id), "i-%08llx",
                    static_cast<unsigned long long>(Uniform(incident, 0, 0xffffffffLL)));
      out.test_events.push_back(MakeEvent(ActorName(actor), OperationOf(actor, 0), {id},
                                          t0 + Millis{Uniform(incident, 0, bin_ms - 1)},
                                          kUnusualRegion));
      out.truth.root_causes.insert(ActorName(actor));
      break;
    }
  }
  SortEvents(out.train_events);
  SortEvents(out.test_events);
  return out;
}

std::vector<Event> DropEvents(std::span<const Event> events, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0 && fraction <= 1)) {
    throw Error(ErrorCode::kBadConfig, "drop fraction must be in [0, 1]");
  }
  std::mt19937_64 rng(Mix(seed));
  std::bernoulli_distribution drop(fraction);
  std::vector<Event> out;
  out.reserve(events.size());
  for (const auto& e : events) {
    if (!drop(rng)) out.push_back(e);
  }
  return out;
}

}  // namespace eventlens
