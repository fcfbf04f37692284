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

#ifndef EVENTLENS_RCL_H_
#define EVENTLENS_RCL_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "eventlens/detector.h"
#include "eventlens/event.h"
#include "json.hpp"

namespace eventlens {

enum class NodeKind { kActor, kResource, kAnomaly };

std::string_view NodeKindName(NodeKind kind);

struct Node {
  NodeKind kind;
  std::string name;
  TimePoint time;  // anomaly nodes only: t_a

  // Unique across kinds: "actor:<name>", "resource:<name>", "anomaly:<name>".
  std::string key() const;
};

// Actor->Resource edges carry the operation; Resource->Anomaly edges carry
// an empty operation.
struct Edge {
  std::size_t source;
  std::size_t target;
  std::string operation;
  TimePoint time;
};

// Directed multigraph. Parallel edges between the same pair are kept.
class InterventionGraph {
 public:
  std::size_t AddNode(NodeKind kind, const std::string& name, TimePoint time = {});
  // Throws kInvalidField when an endpoint does not exist.
  std::size_t AddEdge(std::size_t source, std::size_t target, std::string operation,
                      TimePoint time);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  // Index of the node, or nodes().size() when absent.
  std::size_t Find(NodeKind kind, const std::string& name) const;
  // Incoming edge indices ordered by (time, edge index).
  std::span<const std::size_t> InEdges(std::size_t node) const;
  std::span<const std::size_t> OutEdges(std::size_t node) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::vector<std::size_t>> out_;
};

struct AnomalyStart {
  std::size_t node;
  TimePoint time;
};

struct BuiltGraph {
  InterventionGraph graph;
  std::vector<AnomalyStart> anomalies;  // one per report, in report order
};

// One actor node per actor and an edge per (event, resource); one anomaly
// node per report with a Resource->Anomaly edge for every resource of every
// associated event. Throws kDanglingAnomaly when a report event is not among
// `events`.
BuiltGraph BuildGraph(std::span<const Event> events, std::span<const AnomalyReport> reports);

struct WalkConfig {
  std::int64_t walks = 100;
  std::uint64_t seed = 42;

  void Validate() const;  // kBadConfig when walks < 1
};

struct WalkResult {
  std::vector<std::int64_t> visits;  // per node
  std::int64_t steps = 0;
  // Edges traversed by walks that reached each actor node.
  std::map<std::size_t, std::set<std::size_t>> paths;
};

// Backward walks from every anomaly. A step samples uniformly among incoming
// edges with time <= the walker's current time and moves to the edge's source
// at the edge's time. Each walk draws from its own generator seeded from
// (seed, anomaly index, walk index).
WalkResult TimeAwareWalk(const InterventionGraph& graph, std::span<const AnomalyStart> anomalies,
                         const WalkConfig& config = {});

struct Intervention {
  std::string operation;
  std::string resource;
  TimePoint time;
};

struct RankedCause {
  std::string actor;
  std::int64_t visit_count = 0;
  std::vector<Intervention> interventions;  // time ascending
  std::vector<std::size_t> subgraph_nodes;
  std::vector<std::size_t> subgraph_edges;
};

struct RootCauseRanking {
  std::vector<RankedCause> causes;
  // Set when anomalies existed but no walk reached an actor.
  bool no_actor_reached = false;
};

// Visited actors by visit count descending, then earliest intervention, then
// name.
RootCauseRanking Rank(const InterventionGraph& graph, const WalkResult& walk);

std::string ExportDot(const InterventionGraph& graph, const RootCauseRanking& ranking);
nlohmann::json RankingToJson(const InterventionGraph& graph, const RootCauseRanking& ranking);
// Node-link document: {"directed", "multigraph", "nodes", "links", "ranking"}.
nlohmann::json GraphToJson(const InterventionGraph& graph, const RootCauseRanking& ranking);
// Rebuilds the graph from GraphToJson output. Throws kSchemaError.
InterventionGraph GraphFromJson(const nlohmann::json& document);

struct LocalizeResult {
  TimePoint window_start;  // W'
  TimePoint window_end;
  BuiltGraph built;
  WalkResult walk;
  RootCauseRanking ranking;
};

// Collects the reports of every anomalous verdict, restricts events to
// [first anomalous window start - extension, last anomalous window end) and
// runs graph construction, walks and ranking. No anomalous verdict yields an
// empty result.
LocalizeResult Localize(std::span<const Event> events, std::span<const WindowVerdict> verdicts,
                        const WalkConfig& config = {}, Millis extension = Millis{3600000});

}  // namespace eventlens

#endif  // EVENTLENS_RCL_H_
