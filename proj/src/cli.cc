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

#include "eventlens/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "eventlens/config.h"
#include "eventlens/detector.h"
#include "eventlens/efp.h"
#include "eventlens/error.h"
#include "eventlens/esp.h"
#include "eventlens/metrics.h"
#include "eventlens/pipeline.h"
#include "eventlens/rcl.h"
#include "eventlens/simulate.h"

namespace eventlens {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string Dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

// Config keys given on the command line, applied over the config file.
class Overrides {
 public:
  template <typename T>
  void Add(CLI::App* app, const std::string& key, const std::string& help) {
    auto* option = app->add_option_function<T>(
        Dashed(key), [this, key](const T& value) { values_[key] = value; }, help);
    if constexpr (std::is_same_v<T, std::vector<std::string>>) option->delimiter(',');
  }

  void Flag(CLI::App* app, const std::string& name, const std::string& key, bool value,
            const std::string& help) {
    app->add_flag_callback(name, [this, key, value] { values_[key] = value; }, help);
  }

  const json& values() const { return values_; }

 private:
  json values_ = json::object();
};

void AddMappingOptions(CLI::App* app, Overrides& o) {
  o.Add<std::string>(app, "actor_path", "Dotted path of the actor field");
  o.Add<std::string>(app, "operation_path", "Dotted path of the operation field");
  o.Add<std::string>(app, "resources_path", "Dotted path of the resources field");
  o.Add<std::string>(app, "time_path", "Dotted path of the timestamp field");
}

void AddLearnerOptions(CLI::App* app, Overrides& o) {
  o.Add<std::vector<std::string>>(app, "group_keys",
                                  "Comma-separated paths defining a pattern skeleton");
  o.Add<std::vector<std::string>>(app, "generalize_paths",
                                  "Comma-separated paths generalized to In/Like (* = all)");
  o.Add<std::int64_t>(app, "max_set_size", "Largest value set kept as In before Like");
}

void AddWalkOptions(CLI::App* app, Overrides& o) {
  o.Add<std::int64_t>(app, "walks", "Random walks per anomaly");
  o.Add<std::uint64_t>(app, "seed", "Random seed");
  o.Add<std::int64_t>(app, "extended_window_seconds",
                      "Look-back before the first anomalous window");
}

void WriteText(const std::string& path, const std::string& text) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file", path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed", path);
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open file", path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json ReadJson(const std::string& path) {
  auto text = ReadText(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedJson, e.what(), path);
  }
}

// Re-throws library errors that lack a path with the file they came from.
template <typename F>
auto WithPath(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (!e.path().empty()) throw;
    throw Error(e.code(), e.what(), path, e.line());
  }
}

std::vector<Event> ReadEvents(const std::string& path, const FieldMapping& mapping) {
  return WithPath(path, [&] { return ReadEventsFile(path, mapping); });
}

std::vector<WindowVerdict> ReadVerdictsFile(const std::string& path, const FieldMapping& mapping) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open verdicts file", path);
  return WithPath(path, [&] { return ReadVerdicts(in, mapping); });
}

std::string Pretty(const json& document) { return document.dump(2) + "\n"; }

void EchoConfig(const std::string& output, const Config& config) {
  WriteText(output + ".config.json", Pretty(ConfigToJson(config)));
}

struct Context {
  std::optional<std::string> config_path;
  Overrides overrides;

  Config Resolve(std::optional<json> base = std::nullopt) const {
    Config config;
    if (base) config = ConfigFromJson(*base, config);
    if (config_path) {
      config = WithPath(*config_path, [&] { return ConfigFromJson(ReadJson(*config_path), config); });
    }
    return ConfigFromJson(overrides.values(), config);
  }
};

void OutputOrStdout(const std::optional<std::string>& path, const std::string& text,
                    std::ostream& out) {
  if (path) {
    WriteText(*path, text);
  } else {
    out << text;
  }
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event stream anomaly detection and root cause localization", "eventlens"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  bool json_errors = false;
  app.add_option("--config", ctx.config_path, "Flat JSON config file; flags override it");
  app.add_flag("--json-errors", json_errors, "Report usage errors as JSON on stderr too");

  // learn
  auto* learn = app.add_subcommand("learn", "Learn ESPs and EFP profiles from training events");
  std::string learn_events;
  std::optional<std::string> learn_out, learn_dir;
  learn->add_option("--events", learn_events, "Training events (NDJSON)")->required();
  auto* learn_out_opt = learn->add_option("--out", learn_out, "ESP file; efp.json is written next to it");
  learn->add_option("--out-dir", learn_dir, "Directory for esps.json, efp.json and config.json")
      ->excludes(learn_out_opt);
  AddMappingOptions(learn, ctx.overrides);
  AddLearnerOptions(learn, ctx.overrides);
  ctx.overrides.Add<std::int64_t>(learn, "bin_seconds", "Frequency bin width");
  ctx.overrides.Add<std::int64_t>(learn, "subsequence_length", "Subsequence length M");
  ctx.overrides.Add<double>(learn, "alpha", "Significance level");
  ctx.overrides.Add<std::int64_t>(learn, "profile_retention", "Windows kept per profile");
  ctx.overrides.Flag(learn, "--no-esp", "esp_enabled", false, "Frequency-only model (catch-all ESP)");

  // detect
  auto* detect = app.add_subcommand("detect", "Detect anomalous windows in an event stream");
  std::string detect_events;
  std::optional<std::string> esps_path, efp_path, models_dir, detect_out, save_models;
  detect->add_option("--events", detect_events, "Events to scan (NDJSON)")->required();
  detect->add_option("--esps", esps_path, "ESP file");
  detect->add_option("--efp", efp_path, "EFP model file");
  detect->add_option("--models", models_dir, "Directory written by learn --out-dir");
  detect->add_option("--out", detect_out, "Verdicts (NDJSON); stdout when omitted");
  detect->add_option("--save-models", save_models, "Write the adapted models to this directory");
  AddMappingOptions(detect, ctx.overrides);
  AddLearnerOptions(detect, ctx.overrides);
  ctx.overrides.Add<std::int64_t>(detect, "window_seconds", "Detection window (must equal the bin)");
  ctx.overrides.Add<std::int64_t>(detect, "promotion_threshold", "Per-window count T_s for promotion");
  ctx.overrides.Add<std::int64_t>(detect, "promotion_windows", "Consecutive windows N_w for promotion");
  ctx.overrides.Add<std::int64_t>(detect, "unmatched_retention", "Unmatched events kept per skeleton");
  ctx.overrides.Flag(detect, "--no-adapt", "adaptation", false, "Disable promotion and profile updates");
  ctx.overrides.Flag(detect, "--no-esp", "esp_enabled", false, "Frequency checks only");
  ctx.overrides.Flag(detect, "--no-efp", "efp_enabled", false, "Pointwise checks only");

  // localize and export-graph
  auto* localize = app.add_subcommand("localize", "Rank root-cause actors for detected anomalies");
  auto* export_graph = app.add_subcommand("export-graph", "Write the intervention graph");
  std::string loc_events, loc_verdicts;
  std::optional<std::string> loc_out, loc_dot, loc_graph;
  std::string format = "dot";
  for (auto* sub : {localize, export_graph}) {
    sub->add_option("--events", loc_events, "Events covering the anomalies (NDJSON)")->required();
    sub->add_option("--verdicts", loc_verdicts, "Verdicts from detect (NDJSON)")->required();
    AddMappingOptions(sub, ctx.overrides);
    AddWalkOptions(sub, ctx.overrides);
  }
  localize->add_option("--out", loc_out, "Ranking JSON; stdout when omitted");
  localize->add_option("--dot", loc_dot, "Also write the graph as DOT");
  localize->add_option("--graph-json", loc_graph, "Also write the graph as node-link JSON");
  export_graph->add_option("--format", format, "dot or json")
      ->check(CLI::IsMember({"dot", "json"}));
  export_graph->add_option("--out", loc_out, "Output file; stdout when omitted");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic incident case");
  std::string kind_name, sim_dir;
  std::uint64_t sim_seed = 42;
  SimulationScale scale;
  std::int64_t train_minutes = scale.train.count() / 60000;
  std::int64_t test_minutes = scale.test.count() / 60000;
  std::int64_t sim_bin_seconds = scale.bin.count() / 1000;
  simulate->add_option("--kind", kind_name, "dos, secret, unusual or none")->required();
  simulate->add_option("--seed", sim_seed, "Random seed");
  simulate->add_option("--out-dir", sim_dir, "Writes train.ndjson, test.ndjson, truth.json")->required();
  simulate->add_option("--actors", scale.actors, "Number of actors");
  simulate->add_option("--resources", scale.resources, "Number of resources");
  simulate->add_option("--train-minutes", train_minutes, "Training duration");
  simulate->add_option("--test-minutes", test_minutes, "Test duration");
  simulate->add_option("--bin-seconds", sim_bin_seconds, "Bin width");

  // eval
  auto* eval = app.add_subcommand("eval", "Score verdicts and rankings against ground truth");
  std::vector<std::string> truth_paths, verdict_paths, ranking_paths;
  std::optional<std::string> eval_out;
  int max_k = 5;
  eval->add_option("--truth", truth_paths, "truth.json per case (repeatable)")->required();
  eval->add_option("--verdicts", verdict_paths, "Verdicts per case, same order (repeatable)")
      ->required();
  eval->add_option("--rankings", ranking_paths, "Ranking per case, same order (repeatable)");
  eval->add_option("--out", eval_out, "Metrics JSON; stdout when omitted");
  eval->add_option("--max-k", max_k, "Largest k for AC@k and Avg@k")->check(CLI::PositiveNumber);
  AddMappingOptions(eval, ctx.overrides);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (json_errors) {
      err << json{{"error", "Usage"}, {"message", e.what()}}.dump() << "\n";
    }
    err << e.what() << "\n\n";
    const CLI::App* failed = &app;
    for (auto* sub : app.get_subcommands()) failed = sub;
    err << failed->help();
    return 2;
  }

  try {
    if (learn->parsed()) {
      if (!learn_out && !learn_dir) throw CLI::RequiredError("--out or --out-dir");
      const Config config = ctx.Resolve();
      auto events = ReadEvents(learn_events, config.mapping());
      auto models = TrainModels(events, config);
      std::string esps_file, efp_file, config_file;
      if (learn_dir) {
        esps_file = (fs::path(*learn_dir) / "esps.json").string();
        efp_file = (fs::path(*learn_dir) / "efp.json").string();
        config_file = (fs::path(*learn_dir) / "config.json").string();
      } else {
        esps_file = *learn_out;
        efp_file = (fs::path(*learn_out).parent_path() / "efp.json").string();
        config_file = *learn_out + ".config.json";
      }
      WriteText(esps_file, SerializeEsps(models.esps));
      WriteText(efp_file, Pretty(EfpToJson(models.efp)));
      WriteText(config_file, Pretty(ConfigToJson(config)));
    } else if (detect->parsed()) {
      std::optional<json> base;
      if (models_dir) {
        esps_path = esps_path.value_or((fs::path(*models_dir) / "esps.json").string());
        efp_path = efp_path.value_or((fs::path(*models_dir) / "efp.json").string());
        auto saved = fs::path(*models_dir) / "config.json";
        if (fs::exists(saved)) base = WithPath(saved.string(), [&] { return ReadJson(saved.string()); });
      }
      if (!esps_path || !efp_path) throw CLI::RequiredError("--esps and --efp, or --models");
      const Config config = ctx.Resolve(base);
      auto rules = WithPath(*esps_path, [&] { return EspsFromJson(ReadJson(*esps_path)); });
      Models models{EspSet(rules.rules(), config.learner()),
                    WithPath(*efp_path, [&] { return EfpFromJson(ReadJson(*efp_path)); })};
      auto events = ReadEvents(detect_events, config.mapping());
      auto result = Detect(models, events, config);
      std::ostringstream lines;
      WriteVerdicts(lines, result.verdicts, config.mapping());
      OutputOrStdout(detect_out, lines.str(), out);
      if (detect_out) EchoConfig(*detect_out, config);
      if (save_models) {
        WriteText((fs::path(*save_models) / "esps.json").string(), SerializeEsps(result.esps));
        WriteText((fs::path(*save_models) / "efp.json").string(), Pretty(EfpToJson(result.efp)));
        WriteText((fs::path(*save_models) / "config.json").string(), Pretty(ConfigToJson(config)));
      }
    } else if (localize->parsed() || export_graph->parsed()) {
      const Config config = ctx.Resolve();
      auto events = ReadEvents(loc_events, config.mapping());
      auto verdicts = ReadVerdictsFile(loc_verdicts, config.mapping());
      auto result = WithPath(loc_verdicts, [&] { return LocalizeVerdicts(events, verdicts, config); });
      const auto& graph = result.built.graph;
      if (result.ranking.no_actor_reached) {
        err << json{{"warning", "NoActorReached"},
                    {"message", "no walk reached an actor; ranking is empty"}}
                   .dump()
            << "\n";
      }
      if (localize->parsed()) {
        OutputOrStdout(loc_out, Pretty(RankingToJson(graph, result.ranking)), out);
        if (loc_out) EchoConfig(*loc_out, config);
        if (loc_dot) WriteText(*loc_dot, ExportDot(graph, result.ranking));
        if (loc_graph) WriteText(*loc_graph, Pretty(GraphToJson(graph, result.ranking)));
      } else {
        OutputOrStdout(loc_out,
                       format == "dot" ? ExportDot(graph, result.ranking)
                                       : Pretty(GraphToJson(graph, result.ranking)),
                       out);
      }
    } else if (simulate->parsed()) {
      scale.train = Millis{train_minutes * 60000};
      scale.test = Millis{test_minutes * 60000};
      scale.bin = Millis{sim_bin_seconds * 1000};
      auto simulated = Simulate(ParseIncidentKind(kind_name), sim_seed, scale);
      std::ostringstream train, test;
      WriteEvents(train, simulated.train_events);
      WriteEvents(test, simulated.test_events);
      const fs::path dir(sim_dir);
      WriteText((dir / "train.ndjson").string(), train.str());
      WriteText((dir / "test.ndjson").string(), test.str());
      WriteText((dir / "truth.json").string(), Pretty(TruthToJson(simulated.truth)));
    } else if (eval->parsed()) {
      const Config config = ctx.Resolve();
      if (verdict_paths.size() != truth_paths.size() ||
          (!ranking_paths.empty() && ranking_paths.size() != truth_paths.size())) {
        throw Error(ErrorCode::kLengthMismatch,
                    "--truth, --verdicts and --rankings must be given once per case");
      }
      std::vector<bool> predicted, labels;
      std::vector<RankedCase> ranked;
      for (std::size_t i = 0; i < truth_paths.size(); ++i) {
        auto truth = WithPath(truth_paths[i], [&] { return TruthFromJson(ReadJson(truth_paths[i])); });
        auto verdicts = ReadVerdictsFile(verdict_paths[i], config.mapping());
        labels.push_back(truth.label);
        predicted.push_back(std::any_of(verdicts.begin(), verdicts.end(),
                                        [](const WindowVerdict& v) { return v.y; }));
        if (truth.label && !ranking_paths.empty()) {
          auto ranking = ReadJson(ranking_paths[i]);
          RankedCase c;
          c.truth = truth.root_causes;
          WithPath(ranking_paths[i], [&] {
            if (!ranking.is_array()) throw Error(ErrorCode::kSchemaError, "ranking must be an array");
            for (const auto& entry : ranking) {
              if (!entry.is_object() || !entry.contains("actor") || !entry["actor"].is_string()) {
                throw Error(ErrorCode::kSchemaError, "ranking entry needs a string actor");
              }
              c.ranking.push_back(entry["actor"].get<std::string>());
            }
            return 0;
          });
          ranked.push_back(std::move(c));
        }
      }
      auto report = Evaluate(predicted, labels, ranked, max_k);
      OutputOrStdout(eval_out, Pretty(MetricsToJson(report)), out);
      if (eval_out) EchoConfig(*eval_out, config);
    }
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    for (auto* sub : app.get_subcommands()) err << sub->help();
    return 2;
  } catch (const Error& e) {
    err << e.ToJson() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << Error(ErrorCode::kIo, e.what()).ToJson() << "\n";
    return 1;
  }
  return 0;
}

int RunCli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return RunCli(args, std::cout, std::cerr);
}

}  // namespace eventlens
