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

// Runs the acceptance criteria end to end and prints one PASS/FAIL line per
// criterion. Exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eventlens/adaptation.h"
#include "eventlens/config.h"
#include "eventlens/efp.h"
#include "eventlens/esp.h"
#include "eventlens/metrics.h"
#include "eventlens/pipeline.h"
#include "eventlens/rcl.h"
#include "eventlens/simulate.h"
#include "test_support.h"

namespace eventlens {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---- shared end-to-end run over the synthetic benchmark ----

struct CaseRun {
  GroundTruth truth;
  bool detected = false;
  std::string verdicts;
  std::vector<std::string> ranking;
  std::string ranking_json;
};

CaseRun RunCase(IncidentKind kind, std::uint64_t seed, const Config& config, double drop = 0) {
  auto c = Simulate(kind, seed);
  auto train = drop > 0 ? DropEvents(c.train_events, drop, seed) : c.train_events;
  auto models = TrainModels(train, config);
  auto detected = Detect(models, c.test_events, config);
  CaseRun run;
  run.truth = c.truth;
  for (const auto& v : detected.verdicts) run.detected = run.detected || v.y;
  std::ostringstream lines;
  WriteVerdicts(lines, detected.verdicts, config.mapping());
  run.verdicts = lines.str();
  if (run.detected) {
    auto localized = LocalizeVerdicts(c.test_events, detected.verdicts, config);
    for (const auto& cause : localized.ranking.causes) run.ranking.push_back(cause.actor);
    run.ranking_json = RankingToJson(localized.built.graph, localized.ranking).dump();
  }
  return run;
}

struct Benchmark {
  std::vector<CaseRun> cases;
  MetricsReport report;
  double incident_recall = 0;
  double seconds = 0;
};

Benchmark RunBenchmark(double drop = 0) {
  Benchmark b;
  const auto start = Clock::now();
  Config config;
  for (auto kind : {IncidentKind::kDoS, IncidentKind::kSecretDeactivation,
                    IncidentKind::kUnusualActivity, IncidentKind::kNone}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) b.cases.push_back(RunCase(kind, seed, config, drop));
  }
  std::vector<bool> predicted, labels;
  std::vector<RankedCase> ranked;
  int incidents = 0, caught = 0;
  for (const auto& c : b.cases) {
    predicted.push_back(c.detected);
    labels.push_back(c.truth.label);
    if (c.truth.label) {
      ++incidents;
      caught += c.detected ? 1 : 0;
      ranked.push_back({c.ranking, c.truth.root_causes});
    }
  }
  b.report = Evaluate(predicted, labels, ranked, 5);
  b.incident_recall = static_cast<double>(caught) / incidents;
  b.seconds = Seconds(start);
  return b;
}

std::string Format(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

// ---- criteria ----

Outcome ProfileOracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20260516);
  double worst = 0;
  int compared = 0;
  bool ok = true;
  for (int s = 0; s < 200; ++s) {
    // Alternate wide and narrow value ranges so ties are exercised too.
    const std::int64_t max_value = s % 2 == 0 ? 1000 : 3;
    const std::size_t length = 26 + rng() % (500 - 26 + 1);
    FrequencySeries series;
    series.bin = Millis{60000};
    for (std::size_t i = 0; i < length; ++i) {
      series.counts.push_back(static_cast<std::int64_t>(rng() % (max_value + 1)));
    }
    for (std::size_t m : {2, 3, 6, 13}) {
      auto profile = BuildProfile(series, m);
      auto oracle = testing::BruteForceProfile(series.counts, m);
      if (profile.distances.size() != oracle.size()) {
        ok = false;
        continue;
      }
      for (std::size_t i = 0; i < oracle.size(); ++i) {
        worst = std::max(worst, std::abs(profile.distances[i] - oracle[i]));
      }
      ++compared;
    }
  }
  ok = ok && worst <= 1e-9;
  return {ok, Format("%d profiles, max |diff| = %.3g, %.1fs", compared, worst, Seconds(start))};
}

Outcome SurvivalFixtures() {
  const std::vector<double> f = {0, 0, 1, 1, 2};
  struct Row {
    double d_new;
    double expected;
  };
  const Row rows[] = {{2, 0.0}, {1.5, 0.2}, {0, 0.6}, {-0.5, 1.0}};
  bool ok = true;
  std::string detail;
  for (const auto& row : rows) {
    const double s = Survival(f, row.d_new);
    ok = ok && s == row.expected;
    detail += Format("S(%g)=%g ", row.d_new, s);
  }
  return {ok, detail};
}

Outcome DetectionAtDeskScale(const Benchmark& b) {
  const auto& d = b.report.detection;
  const bool ok = d.f1 >= 0.90 && b.incident_recall == 1.0;
  return {ok, Format("F1 = %.3f (tp %lld fp %lld fn %lld tn %lld), incident recall = %.3f, %.1fs", d.f1,
                     static_cast<long long>(d.tp), static_cast<long long>(d.fp),
                     static_cast<long long>(d.fn), static_cast<long long>(d.tn), b.incident_recall,
                     b.seconds)};
}

Outcome LocalizationAtDeskScale(const Benchmark& b) {
  if (b.report.ac_at.empty()) return {false, "no ranked cases"};
  const double ac1 = b.report.ac_at.at(1), ac3 = b.report.ac_at.at(3);
  return {ac3 == 1.0 && ac1 >= 0.8, Format("AC@1 = %.3f, AC@3 = %.3f, Avg@5 = %.3f", ac1, ac3,
                                          b.report.avg_at.at(5))};
}

Outcome Determinism(const Benchmark& first) {
  const auto second = RunBenchmark();
  bool ok = MetricsToJson(first.report).dump() == MetricsToJson(second.report).dump();
  int differing = 0;
  for (std::size_t i = 0; i < first.cases.size(); ++i) {
    if (first.cases[i].verdicts != second.cases[i].verdicts ||
        first.cases[i].ranking_json != second.cases[i].ranking_json) {
      ++differing;
    }
  }
  ok = ok && differing == 0;
  return {ok, Format("%zu cases compared, %d differ", first.cases.size(), differing)};
}

Outcome TimeFilter() {
  BuiltGraph built;
  auto& g = built.graph;
  auto a1 = g.AddNode(NodeKind::kActor, "A1");
  auto a2 = g.AddNode(NodeKind::kActor, "A2");
  auto r1 = g.AddNode(NodeKind::kResource, "R1");
  auto x = g.AddNode(NodeKind::kAnomaly, "0", testing::At(3));
  g.AddEdge(a1, r1, "op", testing::At(5));
  g.AddEdge(a2, r1, "op", testing::At(1));
  g.AddEdge(r1, x, "", testing::At(3));
  built.anomalies.push_back({x, testing::At(3)});
  int runs = 0;
  bool ok = true;
  for (std::int64_t n : {1, 2, 3, 10, 100, 1000}) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      auto walk = TimeAwareWalk(g, built.anomalies, {n, seed});
      auto ranking = Rank(g, walk);
      ok = ok && walk.visits[a1] == 0 && !ranking.causes.empty() && ranking.causes[0].actor == "A2";
      ++runs;
    }
  }
  return {ok, Format("%d (N, seed) combinations", runs)};
}

Outcome Contamination(const Benchmark& clean) {
  std::mt19937_64 rng(77);
  bool monotone = true;
  for (int p = 0; p < 100; ++p) {
    std::vector<double> f(1 + rng() % 200);
    for (auto& v : f) v = static_cast<double>(rng() % 50);
    const double d_new = static_cast<double>(rng() % 60);
    const double before = Survival(f, d_new);
    for (std::size_t k = 1 + rng() % 20; k > 0; --k) f.push_back(d_new + 1 + static_cast<double>(rng() % 100));
    monotone = monotone && Survival(f, d_new) >= before;
  }
  const auto dropped = RunBenchmark(0.10);
  const double loss = clean.report.detection.f1 - dropped.report.detection.f1;
  return {monotone && loss <= 0.15,
          Format("survival monotone over 100 profiles: %s; F1 %.3f -> %.3f at 10%% drop (loss %.3f)",
                 monotone ? "yes" : "no", clean.report.detection.f1, dropped.report.detection.f1, loss)};
}

Outcome Throughput() {
  // 50 operations, each with its own actor pool and resource naming, so the
  // learner yields 50 rules mixing Eq, In and Like predicates.
  std::mt19937_64 rng(5);
  auto make = [&](std::int64_t i) {
    const int op = static_cast<int>(rng() % 50);
    char resource[32];
    std::snprintf(resource, sizeof(resource), "arn:res-%02d-%04d", op, static_cast<int>(rng() % (op % 3 == 0 ? 4 : 500)));
    return testing::MakeEvent("svc-" + std::to_string(op) + "-" + std::to_string(rng() % (op % 2 == 0 ? 3 : 20)),
                              "Op" + std::to_string(op), {resource},
                              testing::At(1747612800 + i / 40), op % 5 == 0 ? "us-west-2" : "us-east-1");
  };
  std::vector<Event> train;
  for (std::int64_t i = 0; i < 20000; ++i) train.push_back(make(i));
  auto esps = LearnEsps(train);
  std::vector<Event> stream;
  for (std::int64_t i = 0; i < 100000; ++i) stream.push_back(make(20000 + i));

  auto start = Clock::now();
  std::size_t matched = 0;
  for (const auto& e : stream) matched += esps.Classify(e) ? 1 : 0;
  const double classify_seconds = Seconds(start);
  const double rate = static_cast<double>(stream.size()) / classify_seconds;

  // Localization over a 100k-event window with a handful of anomalies.
  std::vector<WindowVerdict> verdicts;
  for (std::size_t i : {99000u, 99500u, 99990u}) {
    WindowVerdict v;
    const auto ms = ToEpochMillis(stream[i].time);
    v.window_start = FromEpochMillis(ms - ms % 60000);
    v.window_end = v.window_start + Millis{60000};
    v.y = true;
    AnomalyReport report;
    report.window_start = v.window_start;
    report.window_end = v.window_end;
    report.events = {stream[i]};
    v.reports = {report};
    verdicts.push_back(v);
  }
  start = Clock::now();
  auto localized = Localize(stream, verdicts, {100, 42}, Millis{3 * 3600 * 1000});
  const double localize_seconds = Seconds(start);
  const std::size_t edges = localized.built.graph.edges().size();

  const bool ok = esps.size() == 50 && rate >= 20000 && localize_seconds < 60 && edges >= 100000;
  return {ok, Format("%zu rules, %.0f events/s (%zu/%zu matched); localize %zu edges in %.2fs",
                     esps.size(), rate, matched, stream.size(), edges, localize_seconds)};
}

Outcome MetricOracle() {
  std::mt19937_64 rng(31);
  const char* names[] = {"a", "b", "c", "d", "e"};
  int checks = 0;
  bool ok = true;
  for (int fixture = 0; fixture < 10; ++fixture) {
    std::vector<RankedCase> cases(1 + rng() % 5);
    for (auto& c : cases) {
      std::vector<std::string> pool(std::begin(names), std::end(names));
      std::shuffle(pool.begin(), pool.end(), rng);
      c.ranking.assign(pool.begin(), pool.begin() + static_cast<long>(rng() % 6));
      std::shuffle(pool.begin(), pool.end(), rng);
      c.truth.insert(pool.begin(), pool.begin() + static_cast<long>(1 + rng() % 2));
    }
    for (int k = 1; k <= 5; ++k) {
      ok = ok && AcAtK(cases, k) == testing::LiteralAcAtK(cases, k);
      ok = ok && AvgAtK(cases, k) == testing::LiteralAvgAtK(cases, k);
      checks += 2;
    }
  }
  return {ok, Format("%d exact comparisons", checks)};
}

Outcome Adaptation() {
  // Direct streak fixture.
  AdaptationState state;
  state.config.threshold = 5;
  state.config.persistence = 3;
  const std::vector<int> counts = {10, 10, 2, 10, 10, 10};
  std::vector<int> promoted_at;
  EspSet esps;
  for (std::size_t w = 0; w < counts.size(); ++w) {
    std::vector<Event> unmatched;
    for (int i = 0; i < counts[w]; ++i) {
      unmatched.push_back(testing::MakeEvent("svc-new", "ListBuckets", {"bucket-1"},
                                             testing::At(static_cast<std::int64_t>(w) * 60 + i)));
    }
    TimeWindow window{testing::At(static_cast<std::int64_t>(w) * 60), Millis{60000}, unmatched};
    auto promotions = RecordUnmatched(state, window, unmatched);
    if (!promotions.empty()) {
      promoted_at.push_back(static_cast<int>(w));
      ApplyPromotions(esps, promotions, {});
    }
  }
  const bool once = promoted_at == std::vector<int>{5};
  const bool absorbed =
      esps.Classify(testing::MakeEvent("svc-new", "ListBuckets", {"bucket-1"}, testing::At(400))).has_value();

  // Same pattern through the detector: flagged until promotion, quiet after.
  std::vector<Event> train, test;
  for (int b = 0; b < 40; ++b) {
    for (int i = 0; i < 2; ++i) {
      train.push_back(testing::MakeEvent("svc-a", "GetObject", {"res-1"}, testing::At(1747612800 + b * 60 + i)));
    }
  }
  const std::vector<int> stream_counts = {10, 10, 2, 10, 10, 10, 10, 10};
  for (int w = 0; w < static_cast<int>(stream_counts.size()); ++w) {
    const std::int64_t base = 1747612800 + (40 + w) * 60;
    for (int i = 0; i < 2; ++i) test.push_back(testing::MakeEvent("svc-a", "GetObject", {"res-1"}, testing::At(base + i)));
    for (int i = 0; i < stream_counts[w]; ++i) {
      test.push_back(testing::MakeEvent("svc-new", "ListBuckets", {"bucket-1"}, testing::At(base + 10 + i)));
    }
  }
  Config config;
  auto result = Detect(TrainModels(train, config), test, config);
  std::string flags;
  for (const auto& v : result.verdicts) flags += v.y ? 'T' : 'F';
  const bool quiet_after = flags == "TTTTTTFF";
  return {once && absorbed && quiet_after && result.promoted.size() == 1,
          Format("promoted at window %d (%zu promotions); stream flags %s",
                 promoted_at.empty() ? -1 : promoted_at[0], promoted_at.size(), flags.c_str())};
}

}  // namespace
}  // namespace eventlens

int main() {
  using namespace eventlens;
  int failures = 0;
  auto report = [&failures](int n, const char* name, const Outcome& outcome) {
    std::printf("[%s] C%d %s: %s\n", outcome.pass ? "PASS" : "FAIL", n, name, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("threw: ") + e.what()};
    }
  };

  report(1, "distance profile oracle", guarded(ProfileOracle));
  report(2, "survival fixtures", guarded(SurvivalFixtures));
  Benchmark benchmark;
  Outcome c3, c4;
  try {
    benchmark = RunBenchmark();
    c3 = DetectionAtDeskScale(benchmark);
    c4 = LocalizationAtDeskScale(benchmark);
  } catch (const std::exception& e) {
    c3 = c4 = Outcome{false, std::string("threw: ") + e.what()};
  }
  report(3, "detection at desk scale", c3);
  report(4, "localization at desk scale", c4);
  report(5, "determinism", guarded([&] { return Determinism(benchmark); }));
  report(6, "time filter", guarded(TimeFilter));
  report(7, "contamination robustness", guarded([&] { return Contamination(benchmark); }));
  report(8, "throughput", guarded(Throughput));
  report(9, "metric oracle", guarded(MetricOracle));
  report(10, "adaptation", guarded(Adaptation));
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
