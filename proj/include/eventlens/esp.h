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

#ifndef EVENTLENS_ESP_H_
#define EVENTLENS_ESP_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eventlens/event.h"

namespace eventlens {

// Event Semantic Patterns: interpretable predicate trees over event fields.
// The on-disk form is the jsonLogic subset {"and", "==", "like", "in", "var"}.

struct Predicate;

struct EqPredicate {
  std::string path;
  Scalar value;
};

// Full-string regular expression match (ECMAScript). An unanchored pattern
// behaves as if wrapped in ^...$; explicit anchors are kept verbatim.
struct LikePredicate {
  std::string path;
  std::string pattern;
  std::shared_ptr<const std::regex> regex;
};

struct InPredicate {
  std::string path;
  std::vector<Scalar> values;
};

struct AndPredicate {
  std::vector<Predicate> terms;
};

struct Predicate {
  std::variant<EqPredicate, LikePredicate, InPredicate, AndPredicate> node;
};

bool operator==(const Predicate& a, const Predicate& b);

// Factories validate the invariants and throw kSchemaError.
Predicate MakeEq(std::string path, Scalar value);
Predicate MakeLike(std::string path, std::string pattern);
Predicate MakeIn(std::string path, std::vector<Scalar> values);
Predicate MakeAnd(std::vector<Predicate> terms);

// A comparison on an absent path is false.
bool Evaluate(const Predicate& predicate, const Event& event, const FieldMapping& mapping);

// Number of Eq leaves in the tree.
std::size_t CountEq(const Predicate& predicate);

class EspRule {
 public:
  EspRule(std::string id, Predicate root);

  const std::string& id() const { return id_; }
  const Predicate& root() const { return root_; }
  std::size_t specificity() const { return specificity_; }

  bool Matches(const Event& event, const FieldMapping& mapping = {}) const;

  bool operator==(const EspRule& other) const {
    return id_ == other.id_ && root_ == other.root_;
  }

 private:
  std::string id_;
  Predicate root_;
  std::size_t specificity_;
  // Conjunct evaluation order: Eq, In, Like, nested And. Evaluation order does
  // not affect the result; cheap comparisons are tried first.
  std::vector<std::size_t> plan_;  // indices into the root conjunction
};

// Baseline group-and-generalize learner settings.
struct LearnerConfig {
  // Paths whose differing values are generalized to In/Like; "*" means all.
  std::set<std::string> generalize_paths = {"*"};
  // Value sets larger than this become a Like pattern.
  std::size_t max_set_size = 8;
  // Paths whose values define a pattern skeleton; empty means the mapping's
  // operation path.
  std::vector<std::string> group_keys;

  void Validate() const;
  std::vector<std::string> EffectiveGroupKeys(const FieldMapping& mapping) const;
  bool Generalizes(const std::string& path) const;
};

// Ordered rule list with unique ids. Classification picks the matching rule
// with the most Eq predicates, ties broken by the lexicographically smallest
// id, so the answer does not depend on list order.
class EspSet {
 public:
  EspSet() = default;
  explicit EspSet(std::vector<EspRule> rules, LearnerConfig config = {});

  const std::vector<EspRule>& rules() const { return rules_; }
  const LearnerConfig& learner_config() const { return learner_config_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  // Throws kSchemaError on a duplicate id.
  void Add(EspRule rule);

  const EspRule* Match(const Event& event, const FieldMapping& mapping = {}) const;
  std::optional<std::string> Classify(const Event& event, const FieldMapping& mapping = {}) const;

  // The non-matching rule with the most satisfied top-level conjuncts (at
  // least one), ties by id. Used as evidence for pointwise anomalies.
  const EspRule* NearestMiss(const Event& event, const FieldMapping& mapping = {}) const;

  // "esp-0001" style id one past the largest numeric suffix in use.
  std::string NextId() const;

  bool operator==(const EspSet& other) const { return rules_ == other.rules_; }

 private:
  void Reindex();

  std::vector<EspRule> rules_;
  LearnerConfig learner_config_;
  std::vector<std::size_t> order_;  // by (specificity desc, id asc)
};

std::string FormatRuleId(std::size_t n);

// Regex for a set of distinct strings: longest common prefix and suffix kept
// literally, the varying middle as a character class with a length range.
// Every input string matches the result.
std::string GeneralizePattern(std::span<const std::string> values);

// Deterministic baseline learner. Throws kEmptyTraining.
EspSet LearnEsps(std::span<const Event> events, const LearnerConfig& config = {},
                 const FieldMapping& mapping = {}, std::size_t first_id = 1);

nlohmann::json EspsToJson(const EspSet& esps);
std::string SerializeEsps(const EspSet& esps);
EspSet EspsFromJson(const nlohmann::json& document);
// Throws kSchemaError naming the rule id and the JSON path of the bad node.
EspSet ParseEsps(std::string_view text);

nlohmann::json PredicateToJson(const Predicate& predicate);
Predicate PredicateFromJson(const nlohmann::json& node, const std::string& rule_id,
                            const std::string& where = "/rule");

}  // namespace eventlens

#endif  // EVENTLENS_ESP_H_
