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

#include "eventlens/rcl.h"

#include <algorithm>
#include <random>
#include <sstream>
#include <tuple>

#include "eventlens/error.h"

namespace eventlens {

using nlohmann::json;

std::string_view NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kActor:
      return "actor";
    case NodeKind::kResource:
      return "resource";
    case NodeKind::kAnomaly:
      return "anomaly";
  }
  return "unknown";
}

std::string Node::key() const {
  std::string out(NodeKindName(kind));
  out += ':';
  out += name;
  return out;
}

std::size_t InterventionGraph::AddNode(NodeKind kind, const std::string& name, TimePoint time) {
  Node node{kind, name, time};
  auto [it, inserted] = index_.emplace(node.key(), nodes_.size());
  if (!inserted) return it->second;
  nodes_.push_back(std::move(node));
  in_.emplace_back();
  out_.emplace_back();
  return nodes_.size() - 1;
}

std::size_t InterventionGraph::AddEdge(std::size_t source, std::size_t target,
                                       std::string operation, TimePoint time) {
  if (source >= nodes_.size() || target >= nodes_.size()) {
    throw Error(ErrorCode::kInvalidField, "edge endpoint does not exist");
  }
  const std::size_t id = edges_.size();
  edges_.push_back(Edge{source, target, std::move(operation), time});
  // Keep in-edges sorted by (time, id); appends in time order stay O(1).
  auto& in = in_[target];
  auto pos = std::upper_bound(in.begin(), in.end(), id, [this](std::size_t a, std::size_t b) {
    return std::tie(edges_[a].time, a) < std::tie(edges_[b].time, b);
  });
  in.insert(pos, id);
  out_[source].push_back(id);
  return id;
}

std::size_t InterventionGraph::Find(NodeKind kind, const std::string& name) const {
  auto it = index_.find(Node{kind, name, {}}.key());
  return it == index_.end() ? nodes_.size() : it->second;
}

std::span<const std::size_t> InterventionGraph::InEdges(std::size_t node) const {
  return in_.at(node);
}

std::span<const std::size_t> InterventionGraph::OutEdges(std::size_t node) const {
  return out_.at(node);
}

namespace {

using EventKey = std::tuple<std::int64_t, std::string, std::string, std::vector<std::string>>;

EventKey KeyOf(const Event& event) {
  return {ToEpochMillis(event.time), event.actor, event.operation, event.resources};
}

}  // namespace

BuiltGraph BuildGraph(std::span<const Event> events, std::span<const AnomalyReport> reports) {
  BuiltGraph built;
  auto& graph = built.graph;
  std::set<EventKey> present;
  for (const auto& event : events) {
    auto actor = graph.AddNode(NodeKind::kActor, event.actor);
    for (const auto& resource : event.resources) {
      auto target = graph.AddNode(NodeKind::kResource, resource);
      graph.AddEdge(actor, target, event.operation, event.time);
    }
    if (!reports.empty()) present.insert(KeyOf(event));
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& report = reports[i];
    const auto t_a = report.anomaly_time();
    auto anomaly = graph.AddNode(NodeKind::kAnomaly, std::to_string(i), t_a);
    for (const auto& event : report.events) {
      if (!present.contains(KeyOf(event))) {
        throw Error(ErrorCode::kDanglingAnomaly,
                    "report event at " + FormatTime(event.time) + " by '" + event.actor +
                        "' is outside the localization window",
                    "reports/" + std::to_string(i));
      }
      for (const auto& resource : event.resources) {
        graph.AddEdge(graph.Find(NodeKind::kResource, resource), anomaly, "", event.time);
      }
    }
    built.anomalies.push_back({anomaly, t_a});
  }
  return built;
}

void WalkConfig::Validate() const {
  if (walks < 1) throw Error(ErrorCode::kBadConfig, "walks must be >= 1");
}

namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t WalkSeed(std::uint64_t seed, std::uint64_t anomaly, std::uint64_t walk) {
  return SplitMix64(SplitMix64(SplitMix64(seed) ^ anomaly) ^ walk);
}

}  // namespace

WalkResult TimeAwareWalk(const InterventionGraph& graph, std::span<const AnomalyStart> anomalies,
                         const WalkConfig& config) {
  config.Validate();
  const auto& edges = graph.edges();
  WalkResult result;
  result.visits.assign(graph.nodes().size(), 0);
  std::vector<std::size_t> path;
  for (std::size_t a = 0; a < anomalies.size(); ++a) {
    for (std::int64_t w = 0; w < config.walks; ++w) {
      std::mt19937_64 rng(WalkSeed(config.seed, a, static_cast<std::uint64_t>(w)));
      std::size_t u = anomalies[a].node;
      TimePoint t = anomalies[a].time;
      path.clear();
      for (;;) {
        auto in = graph.InEdges(u);
        auto valid_end = std::upper_bound(in.begin(), in.end(), t, [&](TimePoint bound, std::size_t e) {
          return bound < edges[e].time;
        });
        auto valid = static_cast<std::size_t>(valid_end - in.begin());
        if (valid == 0) break;
        std::uniform_int_distribution<std::size_t> pick(0, valid - 1);
        const std::size_t e = in[pick(rng)];
        path.push_back(e);
        u = edges[e].source;
        t = edges[e].time;
        ++result.visits[u];
        ++result.steps;
        if (graph.nodes()[u].kind == NodeKind::kActor) {
          result.paths[u].insert(path.begin(), path.end());
        }
      }
    }
  }
  return result;
}

RootCauseRanking Rank(const InterventionGraph& graph, const WalkResult& walk) {
  RootCauseRanking ranking;
  const auto& nodes = graph.nodes();
  const auto& edges = graph.edges();
  bool any_anomaly = false;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].kind == NodeKind::kAnomaly) any_anomaly = true;
    if (nodes[i].kind != NodeKind::kActor) continue;
    if (i >= walk.visits.size() || walk.visits[i] == 0) continue;
    RankedCause cause;
    cause.actor = nodes[i].name;
    cause.visit_count = walk.visits[i];
    for (auto e : graph.OutEdges(i)) {
      cause.interventions.push_back({edges[e].operation, nodes[edges[e].target].name, edges[e].time});
    }
    std::sort(cause.interventions.begin(), cause.interventions.end(),
              [](const Intervention& a, const Intervention& b) {
                return std::tie(a.time, a.resource, a.operation) <
                       std::tie(b.time, b.resource, b.operation);
              });
    std::set<std::size_t> sub_nodes{i};
    if (auto it = walk.paths.find(i); it != walk.paths.end()) {
      cause.subgraph_edges.assign(it->second.begin(), it->second.end());
      for (auto e : it->second) {
        sub_nodes.insert(edges[e].source);
        sub_nodes.insert(edges[e].target);
      }
    }
    cause.subgraph_nodes.assign(sub_nodes.begin(), sub_nodes.end());
    ranking.causes.push_back(std::move(cause));
  }
  std::sort(ranking.causes.begin(), ranking.causes.end(),
            [](const RankedCause& a, const RankedCause& b) {
              if (a.visit_count != b.visit_count) return a.visit_count > b.visit_count;
              auto ta = a.interventions.empty() ? TimePoint::max() : a.interventions.front().time;
              auto tb = b.interventions.empty() ? TimePoint::max() : b.interventions.front().time;
              if (ta != tb) return ta < tb;
              return a.actor < b.actor;
            });
  ranking.no_actor_reached = any_anomaly && ranking.causes.empty();
  return ranking;
}

namespace {

std::string DotQuote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

json EdgeToJson(const InterventionGraph& graph, std::size_t e) {
  const auto& edge = graph.edges()[e];
  json out = {{"source", graph.nodes()[edge.source].key()},
              {"target", graph.nodes()[edge.target].key()},
              {"time", FormatTime(edge.time)}};
  if (!edge.operation.empty()) out["operation"] = edge.operation;
  return out;
}

}  // namespace

std::string ExportDot(const InterventionGraph& graph, const RootCauseRanking& ranking) {
  std::ostringstream out;
  const auto& nodes = graph.nodes();
  const std::size_t top = ranking.causes.empty()
                              ? nodes.size()
                              : graph.Find(NodeKind::kActor, ranking.causes.front().actor);
  out << "digraph intervention {\n  rankdir=LR;\n";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    out << "  " << DotQuote(node.key()) << " [";
    switch (node.kind) {
      case NodeKind::kActor:
        out << "label=" << DotQuote(node.name) << ", shape=ellipse";
        if (i == top) out << ", style=filled, fillcolor=gold, penwidth=2";
        break;
      case NodeKind::kResource:
        out << "label=" << DotQuote(node.name) << ", shape=box";
        break;
      case NodeKind::kAnomaly:
        out << "label=" << DotQuote("anomaly " + node.name + "\n" + FormatTime(node.time))
            << ", shape=octagon, color=red";
        break;
    }
    out << "];\n";
  }
  for (const auto& edge : graph.edges()) {
    std::string label = edge.operation.empty() ? FormatTime(edge.time)
                                               : edge.operation + " @ " + FormatTime(edge.time);
    out << "  " << DotQuote(nodes[edge.source].key()) << " -> "
        << DotQuote(nodes[edge.target].key()) << " [label=" << DotQuote(label) << "];\n";
  }
  out << "}\n";
  return out.str();
}

json RankingToJson(const InterventionGraph& graph, const RootCauseRanking& ranking) {
  json out = json::array();
  for (const auto& cause : ranking.causes) {
    json interventions = json::array();
    for (const auto& i : cause.interventions) {
      interventions.push_back(
          {{"operation", i.operation}, {"resource", i.resource}, {"time", FormatTime(i.time)}});
    }
    json nodes = json::array();
    for (auto n : cause.subgraph_nodes) nodes.push_back(graph.nodes()[n].key());
    json edges = json::array();
    for (auto e : cause.subgraph_edges) edges.push_back(EdgeToJson(graph, e));
    out.push_back({{"actor", cause.actor},
                   {"visit_count", cause.visit_count},
                   {"interventions", std::move(interventions)},
                   {"subgraph", {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}}}});
  }
  return out;
}

json GraphToJson(const InterventionGraph& graph, const RootCauseRanking& ranking) {
  json nodes = json::array();
  for (const auto& node : graph.nodes()) {
    json entry = {{"id", node.key()}, {"kind", NodeKindName(node.kind)}, {"name", node.name}};
    if (node.kind == NodeKind::kAnomaly) entry["time"] = FormatTime(node.time);
    nodes.push_back(std::move(entry));
  }
  json links = json::array();
  for (std::size_t e = 0; e < graph.edges().size(); ++e) links.push_back(EdgeToJson(graph, e));
  return {{"directed", true},
          {"multigraph", true},
          {"nodes", std::move(nodes)},
          {"links", std::move(links)},
          {"ranking", RankingToJson(graph, ranking)}};
}

InterventionGraph GraphFromJson(const json& document) {
  auto fail = [](const std::string& message, const std::string& where) -> Error {
    return Error(ErrorCode::kSchemaError, message, where);
  };
  if (!document.is_object() || !document.contains("nodes") || !document.contains("links")) {
    throw fail("graph document needs nodes and links", "");
  }
  InterventionGraph graph;
  std::unordered_map<std::string, std::size_t> ids;
  const auto& nodes = document["nodes"];
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& entry = nodes[i];
    const std::string where = "/nodes/" + std::to_string(i);
    try {
      auto kind_name = entry.at("kind").get<std::string>();
      NodeKind kind;
      if (kind_name == "actor") {
        kind = NodeKind::kActor;
      } else if (kind_name == "resource") {
        kind = NodeKind::kResource;
      } else if (kind_name == "anomaly") {
        kind = NodeKind::kAnomaly;
      } else {
        throw fail("unknown node kind '" + kind_name + "'", where);
      }
      TimePoint time{};
      if (entry.contains("time")) time = ParseTime(entry["time"].get<std::string>());
      ids[entry.at("id").get<std::string>()] =
          graph.AddNode(kind, entry.at("name").get<std::string>(), time);
    } catch (const json::exception& e) {
      throw fail(e.what(), where);
    }
  }
  const auto& links = document["links"];
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& entry = links[i];
    const std::string where = "/links/" + std::to_string(i);
    try {
      auto source = ids.find(entry.at("source").get<std::string>());
      auto target = ids.find(entry.at("target").get<std::string>());
      if (source == ids.end() || target == ids.end()) throw fail("unknown link endpoint", where);
      graph.AddEdge(source->second, target->second, entry.value("operation", std::string()),
                    ParseTime(entry.at("time").get<std::string>()));
    } catch (const json::exception& e) {
      throw fail(e.what(), where);
    }
  }
  return graph;
}

LocalizeResult Localize(std::span<const Event> events, std::span<const WindowVerdict> verdicts,
                        const WalkConfig& config, Millis extension) {
  config.Validate();
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].time < events[i - 1].time) {
      throw Error(ErrorCode::kUnsortedInput, "events are not time-ordered", {},
                  static_cast<std::int64_t>(i + 1));
    }
  }
  LocalizeResult result;
  std::vector<AnomalyReport> reports;
  bool any = false;
  for (const auto& verdict : verdicts) {
    if (!verdict.y) continue;
    if (!any) {
      result.window_start = verdict.window_start - extension;
      result.window_end = verdict.window_end;
      any = true;
    }
    result.window_start = std::min(result.window_start, verdict.window_start - extension);
    result.window_end = std::max(result.window_end, verdict.window_end);
    reports.insert(reports.end(), verdict.reports.begin(), verdict.reports.end());
  }
  if (!any) return result;

  auto first = std::lower_bound(events.begin(), events.end(), result.window_start,
                                [](const Event& e, TimePoint t) { return e.time < t; });
  auto last = std::lower_bound(first, events.end(), result.window_end,
                               [](const Event& e, TimePoint t) { return e.time < t; });
  result.built = BuildGraph(std::span<const Event>(first, last), reports);
  result.walk = TimeAwareWalk(result.built.graph, result.built.anomalies, config);
  result.ranking = Rank(result.built.graph, result.walk);
  return result;
}

}  // namespace eventlens
