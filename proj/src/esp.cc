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

#include "eventlens/esp.h"

#include <algorithm>
#include <cstdio>
#include <utility>

#include "eventlens/error.h"

namespace eventlens {

using nlohmann::json;

namespace {

bool ExactEquals(const Scalar& a, const Scalar& b) { return a == b; }

}  // namespace

bool operator==(const Predicate& a, const Predicate& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&b](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, EqPredicate>) {
          return lhs.path == rhs.path && ExactEquals(lhs.value, rhs.value);
        } else if constexpr (std::is_same_v<T, LikePredicate>) {
          return lhs.path == rhs.path && lhs.pattern == rhs.pattern;
        } else if constexpr (std::is_same_v<T, InPredicate>) {
          return lhs.path == rhs.path &&
                 std::equal(lhs.values.begin(), lhs.values.end(), rhs.values.begin(),
                            rhs.values.end(), ExactEquals);
        } else {
          return lhs.terms == rhs.terms;
        }
      },
      a.node);
}

Predicate MakeEq(std::string path, Scalar value) {
  if (path.empty()) throw Error(ErrorCode::kSchemaError, "empty var path");
  return Predicate{EqPredicate{std::move(path), std::move(value)}};
}

Predicate MakeLike(std::string path, std::string pattern) {
  if (path.empty()) throw Error(ErrorCode::kSchemaError, "empty var path");
  std::shared_ptr<const std::regex> regex;
  try {
    regex = std::make_shared<const std::regex>(pattern, std::regex::ECMAScript | std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::kSchemaError, "invalid like pattern '" + pattern + "': " + e.what(), path);
  }
  return Predicate{LikePredicate{std::move(path), std::move(pattern), std::move(regex)}};
}

Predicate MakeIn(std::string path, std::vector<Scalar> values) {
  if (path.empty()) throw Error(ErrorCode::kSchemaError, "empty var path");
  if (values.empty()) throw Error(ErrorCode::kSchemaError, "empty in-set", path);
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (ScalarEquals(AsView(values[i]), AsView(values[j]))) {
        throw Error(ErrorCode::kSchemaError, "duplicate value in in-set", path);
      }
    }
  }
  return Predicate{InPredicate{std::move(path), std::move(values)}};
}

Predicate MakeAnd(std::vector<Predicate> terms) {
  if (terms.empty()) throw Error(ErrorCode::kSchemaError, "empty and-list");
  return Predicate{AndPredicate{std::move(terms)}};
}

bool Evaluate(const Predicate& predicate, const Event& event, const FieldMapping& mapping) {
  return std::visit(
      [&](const auto& p) -> bool {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AndPredicate>) {
          for (const auto& term : p.terms) {
            if (!Evaluate(term, event, mapping)) return false;
          }
          return true;
        } else {
          auto value = FieldValue(event, mapping, p.path);
          if (!value) return false;
          if constexpr (std::is_same_v<T, EqPredicate>) {
            return ScalarEquals(*value, AsView(p.value));
          } else if constexpr (std::is_same_v<T, InPredicate>) {
            return std::any_of(p.values.begin(), p.values.end(), [&](const Scalar& v) {
              return ScalarEquals(*value, AsView(v));
            });
          } else {
            if (const auto* s = std::get_if<std::string_view>(&*value)) {
              return std::regex_match(s->begin(), s->end(), *p.regex);
            }
            std::string text = ScalarText(*value);
            return std::regex_match(text, *p.regex);
          }
        }
      },
      predicate.node);
}

std::size_t CountEq(const Predicate& predicate) {
  if (std::holds_alternative<EqPredicate>(predicate.node)) return 1;
  if (const auto* conj = std::get_if<AndPredicate>(&predicate.node)) {
    std::size_t n = 0;
    for (const auto& term : conj->terms) n += CountEq(term);
    return n;
  }
  return 0;
}

EspRule::EspRule(std::string id, Predicate root)
    : id_(std::move(id)), root_(std::move(root)), specificity_(CountEq(root_)) {
  if (id_.empty()) throw Error(ErrorCode::kSchemaError, "rule id is empty");
  if (const auto* conj = std::get_if<AndPredicate>(&root_.node)) {
    if (conj->terms.empty()) throw Error(ErrorCode::kSchemaError, "empty and-list", id_);
    for (std::size_t i = 0; i < conj->terms.size(); ++i) plan_.push_back(i);
    auto cost = [conj](std::size_t i) { return conj->terms[i].node.index() == 0 ? 0
                                        : conj->terms[i].node.index() == 2   ? 1
                                        : conj->terms[i].node.index() == 1   ? 2
                                                                             : 3; };
    std::stable_sort(plan_.begin(), plan_.end(),
                     [&](std::size_t a, std::size_t b) { return cost(a) < cost(b); });
  }
}

bool EspRule::Matches(const Event& event, const FieldMapping& mapping) const {
  if (const auto* conj = std::get_if<AndPredicate>(&root_.node)) {
    for (std::size_t i : plan_) {
      if (!Evaluate(conj->terms[i], event, mapping)) return false;
    }
    return true;
  }
  return Evaluate(root_, event, mapping);
}

void LearnerConfig::Validate() const {
  if (max_set_size < 2) throw Error(ErrorCode::kBadConfig, "max_set_size must be >= 2");
  for (const auto& key : group_keys) {
    if (key.empty()) throw Error(ErrorCode::kBadConfig, "empty group key");
  }
}

std::vector<std::string> LearnerConfig::EffectiveGroupKeys(const FieldMapping& mapping) const {
  if (group_keys.empty()) return {mapping.operation_path};
  return group_keys;
}

bool LearnerConfig::Generalizes(const std::string& path) const {
  return generalize_paths.count("*") > 0 || generalize_paths.count(path) > 0;
}

EspSet::EspSet(std::vector<EspRule> rules, LearnerConfig config)
    : learner_config_(std::move(config)) {
  for (auto& rule : rules) Add(std::move(rule));
}

void EspSet::Add(EspRule rule) {
  for (const auto& existing : rules_) {
    if (existing.id() == rule.id()) {
      throw Error(ErrorCode::kSchemaError, "duplicate rule id", rule.id());
    }
  }
  rules_.push_back(std::move(rule));
  Reindex();
}

void EspSet::Reindex() {
  order_.resize(rules_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  std::sort(order_.begin(), order_.end(), [this](std::size_t a, std::size_t b) {
    if (rules_[a].specificity() != rules_[b].specificity()) {
      return rules_[a].specificity() > rules_[b].specificity();
    }
    return rules_[a].id() < rules_[b].id();
  });
}

const EspRule* EspSet::Match(const Event& event, const FieldMapping& mapping) const {
  for (std::size_t i : order_) {
    if (rules_[i].Matches(event, mapping)) return &rules_[i];
  }
  return nullptr;
}

std::optional<std::string> EspSet::Classify(const Event& event, const FieldMapping& mapping) const {
  if (const auto* rule = Match(event, mapping)) return rule->id();
  return std::nullopt;
}

const EspRule* EspSet::NearestMiss(const Event& event, const FieldMapping& mapping) const {
  const EspRule* best = nullptr;
  std::size_t best_score = 0;
  for (const auto& rule : rules_) {
    std::size_t score = 0;
    if (const auto* conj = std::get_if<AndPredicate>(&rule.root().node)) {
      for (const auto& term : conj->terms) score += Evaluate(term, event, mapping) ? 1 : 0;
    } else {
      score = Evaluate(rule.root(), event, mapping) ? 1 : 0;
    }
    if (score == 0) continue;
    if (best == nullptr || score > best_score || (score == best_score && rule.id() < best->id())) {
      best = &rule;
      best_score = score;
    }
  }
  return best;
}

std::string FormatRuleId(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "esp-%04zu", n);
  return buf;
}

std::string EspSet::NextId() const {
  std::size_t next = 1;
  for (const auto& rule : rules_) {
    const auto& id = rule.id();
    if (id.rfind("esp-", 0) != 0) continue;
    std::size_t n = 0;
    bool digits = id.size() > 4;
    for (std::size_t i = 4; i < id.size(); ++i) {
      if (id[i] < '0' || id[i] > '9') {
        digits = false;
        break;
      }
      n = n * 10 + static_cast<std::size_t>(id[i] - '0');
    }
    if (digits) next = std::max(next, n + 1);
  }
  return FormatRuleId(next);
}

namespace {

std::string EscapeLiteral(std::string_view text) {
  static constexpr std::string_view kSpecial = "\\^$.|?*+()[]{}/";
  std::string out;
  for (char c : text) {
    if (kSpecial.find(c) != std::string_view::npos) out += '\\';
    out += c;
  }
  return out;
}

std::string CharClass(const std::set<unsigned char>& chars) {
  auto emit = [](std::string& out, unsigned char c) {
    if (c == ']' || c == '\\' || c == '^' || c == '-') out += '\\';
    out += static_cast<char>(c);
  };
  std::vector<unsigned char> sorted(chars.begin(), chars.end());
  std::string out = "[";
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[j] + 1 && sorted[j + 1] < 0x80) ++j;
    if (j - i >= 2 && sorted[i] < 0x80) {
      emit(out, sorted[i]);
      out += '-';
      emit(out, sorted[j]);
      i = j + 1;
    } else {
      emit(out, sorted[i]);
      ++i;
    }
  }
  out += ']';
  return out;
}

}  // namespace

std::string GeneralizePattern(std::span<const std::string> values) {
  if (values.empty()) return ".*";
  std::size_t min_len = values.front().size();
  for (const auto& v : values) min_len = std::min(min_len, v.size());

  std::size_t prefix = 0;
  while (prefix < min_len &&
         std::all_of(values.begin(), values.end(),
                     [&](const std::string& v) { return v[prefix] == values.front()[prefix]; })) {
    ++prefix;
  }
  std::size_t suffix = 0;
  const auto& first = values.front();
  while (suffix < min_len - prefix &&
         std::all_of(values.begin(), values.end(), [&](const std::string& v) {
           return v[v.size() - 1 - suffix] == first[first.size() - 1 - suffix];
         })) {
    ++suffix;
  }

  std::set<unsigned char> chars;
  std::size_t lo = SIZE_MAX;
  std::size_t hi = 0;
  for (const auto& v : values) {
    std::size_t len = v.size() - prefix - suffix;
    lo = std::min(lo, len);
    hi = std::max(hi, len);
    for (std::size_t i = prefix; i < prefix + len; ++i) chars.insert(static_cast<unsigned char>(v[i]));
  }

  std::string out = "^" + EscapeLiteral(std::string_view(first).substr(0, prefix));
  if (hi > 0) {
    out += CharClass(chars);
    if (lo != 1 || hi != 1) {
      out += lo == hi ? "{" + std::to_string(lo) + "}"
                      : "{" + std::to_string(lo) + "," + std::to_string(hi) + "}";
    }
  }
  out += EscapeLiteral(std::string_view(first).substr(first.size() - suffix));
  out += "$";
  return out;
}

EspSet LearnEsps(std::span<const Event> events, const LearnerConfig& config,
                 const FieldMapping& mapping, std::size_t first_id) {
  if (events.empty()) throw Error(ErrorCode::kEmptyTraining, "no training events");
  config.Validate();
  const auto keys = config.EffectiveGroupKeys(mapping);

  using Flat = std::map<std::string, Scalar, std::less<>>;
  std::vector<Flat> flats;
  flats.reserve(events.size());
  std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < events.size(); ++i) {
    flats.push_back(FlattenFields(events[i], mapping));
    std::vector<std::string> skeleton;
    for (const auto& key : keys) {
      auto it = flats.back().find(key);
      skeleton.push_back(it == flats.back().end() ? std::string(1, '\0')
                                                  : ScalarText(AsView(it->second)));
    }
    groups[std::move(skeleton)].push_back(i);
  }

  std::vector<EspRule> rules;
  std::size_t next_id = first_id;
  for (const auto& [skeleton, members] : groups) {
    // Only paths present in every member can appear in the rule.
    std::map<std::string, std::set<Scalar, ScalarLess>> observed;
    for (const auto& [path, value] : flats[members.front()]) observed[path].insert(value);
    for (std::size_t m = 1; m < members.size(); ++m) {
      const auto& flat = flats[members[m]];
      for (auto it = observed.begin(); it != observed.end();) {
        auto found = flat.find(it->first);
        if (found == flat.end()) {
          it = observed.erase(it);
        } else {
          it->second.insert(found->second);
          ++it;
        }
      }
    }

    std::vector<Predicate> terms;
    for (const auto& [path, values] : observed) {
      if (values.size() == 1) {
        terms.push_back(MakeEq(path, *values.begin()));
      } else if (config.Generalizes(path)) {
        if (values.size() <= config.max_set_size) {
          terms.push_back(MakeIn(path, std::vector<Scalar>(values.begin(), values.end())));
        } else {
          std::set<std::string> texts;
          for (const auto& v : values) texts.insert(ScalarText(AsView(v)));
          std::vector<std::string> list(texts.begin(), texts.end());
          terms.push_back(MakeLike(path, GeneralizePattern(list)));
        }
      }
    }
    if (terms.empty()) terms.push_back(MakeLike(mapping.operation_path, ".+"));
    rules.emplace_back(FormatRuleId(next_id++), MakeAnd(std::move(terms)));
  }
  return EspSet(std::move(rules), config);
}

json PredicateToJson(const Predicate& predicate) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AndPredicate>) {
          json terms = json::array();
          for (const auto& term : p.terms) terms.push_back(PredicateToJson(term));
          return json{{"and", terms}};
        } else if constexpr (std::is_same_v<T, EqPredicate>) {
          return json{{"==", json::array({json{{"var", p.path}}, ScalarToJson(p.value)})}};
        } else if constexpr (std::is_same_v<T, LikePredicate>) {
          return json{{"like", json::array({json{{"var", p.path}}, p.pattern})}};
        } else {
          json values = json::array();
          for (const auto& v : p.values) values.push_back(ScalarToJson(v));
          return json{{"in", json::array({json{{"var", p.path}}, values})}};
        }
      },
      predicate.node);
}

namespace {

[[noreturn]] void SchemaFail(const std::string& rule_id, const std::string& where,
                             const std::string& message) {
  throw Error(ErrorCode::kSchemaError, "rule '" + rule_id + "' at " + where + ": " + message,
              rule_id + where);
}

std::string VarPath(const json& operands, const std::string& rule_id, const std::string& where) {
  if (!operands.is_array() || operands.size() != 2) {
    SchemaFail(rule_id, where, "expected a two-element operand array");
  }
  const auto& var = operands[0];
  if (!var.is_object() || var.size() != 1 || !var.contains("var") || !var["var"].is_string()) {
    SchemaFail(rule_id, where + "/0", "expected {\"var\": \"<path>\"}");
  }
  return var["var"].get<std::string>();
}

}  // namespace

Predicate PredicateFromJson(const json& node, const std::string& rule_id, const std::string& where) {
  if (!node.is_object() || node.size() != 1) {
    SchemaFail(rule_id, where, "expected an object with exactly one operator");
  }
  const auto& [op, operands] = *node.items().begin();
  const std::string here = where + "/" + op;
  try {
    if (op == "and") {
      if (!operands.is_array() || operands.empty()) SchemaFail(rule_id, here, "empty and-list");
      std::vector<Predicate> terms;
      for (std::size_t i = 0; i < operands.size(); ++i) {
        terms.push_back(PredicateFromJson(operands[i], rule_id, here + "/" + std::to_string(i)));
      }
      return MakeAnd(std::move(terms));
    }
    if (op == "==") {
      auto path = VarPath(operands, rule_id, here);
      if (operands[1].is_structured()) SchemaFail(rule_id, here + "/1", "expected a scalar");
      return MakeEq(std::move(path), ScalarFromJson(operands[1]));
    }
    if (op == "like") {
      auto path = VarPath(operands, rule_id, here);
      if (!operands[1].is_string()) SchemaFail(rule_id, here + "/1", "expected a pattern string");
      return MakeLike(std::move(path), operands[1].get<std::string>());
    }
    if (op == "in") {
      auto path = VarPath(operands, rule_id, here);
      if (!operands[1].is_array()) SchemaFail(rule_id, here + "/1", "expected an array");
      std::vector<Scalar> values;
      for (const auto& v : operands[1]) {
        if (v.is_structured()) SchemaFail(rule_id, here + "/1", "expected scalars");
        values.push_back(ScalarFromJson(v));
      }
      return MakeIn(std::move(path), std::move(values));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSchemaError || e.path().rfind(rule_id, 0) == 0) throw;
    SchemaFail(rule_id, here, e.what());
  }
  SchemaFail(rule_id, here, "unknown operator '" + op + "'");
}

json EspsToJson(const EspSet& esps) {
  json out = json::array();
  for (const auto& rule : esps.rules()) {
    out.push_back(json{{"id", rule.id()}, {"rule", PredicateToJson(rule.root())}});
  }
  return out;
}

std::string SerializeEsps(const EspSet& esps) { return EspsToJson(esps).dump(2) + "\n"; }

EspSet EspsFromJson(const json& document) {
  if (!document.is_array()) throw Error(ErrorCode::kSchemaError, "ESP file must be a JSON array");
  EspSet esps;
  for (std::size_t i = 0; i < document.size(); ++i) {
    const auto& item = document[i];
    const std::string where = "/" + std::to_string(i);
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string() ||
        !item.contains("rule")) {
      throw Error(ErrorCode::kSchemaError, "entry " + where + " needs string id and rule", where);
    }
    auto id = item["id"].get<std::string>();
    esps.Add(EspRule(id, PredicateFromJson(item["rule"], id)));
  }
  return esps;
}

EspSet ParseEsps(std::string_view text) {
  json document;
  try {
    document = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSchemaError, std::string("ESP file is not valid JSON: ") + e.what());
  }
  return EspsFromJson(document);
}

}  // namespace eventlens
