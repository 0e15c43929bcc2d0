#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gqm/decimal.hpp"
#include "gqm/expr.hpp"
#include "gqm/json_writer.hpp"
#include "gqm/period.hpp"
#include "gqm/typecheck.hpp"

namespace gqm {

enum class Direction { higher_better, lower_better };

inline std::string_view direction_name(Direction d) {
  return d == Direction::higher_better ? "higher_better" : "lower_better";
}

inline std::optional<Direction> direction_from_name(std::string_view s) {
  if (s == "higher_better") return Direction::higher_better;
  if (s == "lower_better") return Direction::lower_better;
  return std::nullopt;
}

// Three status bands with a better-direction flag. The two cut points are
// read inclusively toward the better band. A document may omit the
// direction; the ESM lint flags that as a gap in improvement tracking.
struct TargetBands {
  std::optional<Direction> direction;
  double excellent_at = 0.0;
  double acceptable_at = 0.0;

  friend bool operator==(const TargetBands&, const TargetBands&) = default;
};

enum class Relation { le, ge };

inline std::string_view relation_name(Relation r) { return r == Relation::le ? "le" : "ge"; }

// Plan-declared expected relation on the metric's value, e.g. value le
// param("incident_threshold").
struct Hypothesis {
  Relation relation = Relation::le;
  std::string bound_source;
  ExprPtr bound;
};

inline bool operator==(const Hypothesis& a, const Hypothesis& b) {
  return a.relation == b.relation && equal(a.bound, b.bound);
}

enum class CollectionFrequency { per_period, on_event };

inline std::string_view collection_frequency_name(CollectionFrequency f) {
  return f == CollectionFrequency::per_period ? "per_period" : "on_event";
}

struct Metric {
  std::string metric_id;  // M<digits>.<digits>
  std::string name;
  std::string unit;
  std::string formula_source;
  ExprPtr formula;
  std::vector<std::string> data_sources;  // evidence kinds
  CollectionFrequency collection_frequency = CollectionFrequency::per_period;
  std::string responsible_role;
  std::string audience;
  std::optional<TargetBands> targets;
  std::optional<Hypothesis> hypothesis;
  std::string review_note;  // corrective action taken when unacceptable
};

inline bool operator==(const Metric& a, const Metric& b) {
  return a.metric_id == b.metric_id && a.name == b.name && a.unit == b.unit &&
         equal(a.formula, b.formula) && a.data_sources == b.data_sources &&
         a.collection_frequency == b.collection_frequency &&
         a.responsible_role == b.responsible_role && a.audience == b.audience &&
         a.targets == b.targets && a.hypothesis == b.hypothesis &&
         a.review_note == b.review_note;
}

struct Question {
  std::string question_id;
  std::string text;
  std::vector<std::string> metric_refs;

  friend bool operator==(const Question&, const Question&) = default;
};

struct Goal {
  std::string goal_id;  // G<digits>
  std::string control_ref;
  std::string objective;
  std::string business_goal;
  std::vector<Question> questions;

  friend bool operator==(const Goal&, const Goal&) = default;
};

// The GQM tree. Metrics live in a flat table and are referenced by id from
// questions, so one metric can answer several questions under a goal.
struct MeasurementPlan {
  std::string plan_id;
  std::string organization;
  std::string description;
  PeriodPolicy period_policy;
  std::map<std::string, double> parameters;
  std::vector<Metric> metrics;
  std::vector<Goal> goals;

  const Metric* find_metric(std::string_view id) const {
    for (const Metric& metric : metrics) {
      if (metric.metric_id == id) {
        return &metric;
      }
    }
    return nullptr;
  }

  std::set<std::string, std::less<>> parameter_names() const {
    std::set<std::string, std::less<>> names;
    for (const auto& [name, value] : parameters) {
      names.insert(name);
    }
    return names;
  }
};

inline bool operator==(const MeasurementPlan& a, const MeasurementPlan& b) {
  return a.plan_id == b.plan_id && a.organization == b.organization &&
         a.description == b.description && a.period_policy == b.period_policy &&
         a.parameters == b.parameters && a.metrics == b.metrics && a.goals == b.goals;
}

inline std::vector<TypeError> typecheck(const Expr& e, const MeasurementPlan& plan) {
  return typecheck(e, plan.parameter_names());
}

// --- parsing ----------------------------------------------------------------

struct ParseError {
  std::string where;  // plan element id or JSON path; empty for whole-document errors
  std::string message;

  std::string to_string() const {
    return where.empty() ? message : message + " at " + where;
  }

  friend bool operator==(const ParseError&, const ParseError&) = default;
};

struct PlanParse {
  std::optional<MeasurementPlan> plan;
  std::vector<ParseError> errors;

  bool ok() const { return plan.has_value(); }
};

namespace detail {

inline bool id_matches_pattern(std::string_view id, char prefix, bool dotted) {
  if (id.size() < 2 || id[0] != prefix) {
    return false;
  }
  auto digits = [](std::string_view s) {
    if (s.empty()) {
      return false;
    }
    for (char c : s) {
      if (c < '0' || c > '9') {
        return false;
      }
    }
    return true;
  };
  std::string_view rest = id.substr(1);
  if (!dotted) {
    return digits(rest);
  }
  std::size_t dot = rest.find('.');
  if (dot == std::string_view::npos) {
    return false;
  }
  return digits(rest.substr(0, dot)) && digits(rest.substr(dot + 1));
}

class PlanReader {
 public:
  explicit PlanReader(std::vector<ParseError>& errors) : errors_(errors) {}

  void error(std::string where, std::string message) {
    errors_.push_back({std::move(where), std::move(message)});
  }

  bool check_keys(const nlohmann::json& obj, const std::string& where,
                  std::initializer_list<std::string_view> required,
                  std::initializer_list<std::string_view> optional = {}) {
    bool ok = true;
    for (const auto& [key, value] : obj.items()) {
      bool known = false;
      for (std::string_view k : required) {
        known = known || k == key;
      }
      for (std::string_view k : optional) {
        known = known || k == key;
      }
      if (!known) {
        error(where, "unknown key '" + key + "'");
        ok = false;
      }
    }
    for (std::string_view k : required) {
      if (!obj.contains(k)) {
        error(where, "missing key '" + std::string(k) + "'");
        ok = false;
      }
    }
    return ok;
  }

  std::optional<std::string> get_string(const nlohmann::json& obj, const std::string& where,
                                        std::string_view key) {
    if (!obj.contains(k(key)) || !obj.at(k(key)).is_string()) {
      if (obj.contains(k(key))) {
        error(where, "'" + std::string(key) + "' must be a string");
      }
      return std::nullopt;
    }
    return obj.at(k(key)).get<std::string>();
  }

  std::optional<double> get_number(const nlohmann::json& obj, const std::string& where,
                                   std::string_view key) {
    if (!obj.contains(k(key)) || !obj.at(k(key)).is_number()) {
      if (obj.contains(k(key))) {
        error(where, "'" + std::string(key) + "' must be a number");
      }
      return std::nullopt;
    }
    double value = obj.at(k(key)).get<double>();
    if (!fits_six_places(value)) {
      error(where, "'" + std::string(key) + "' exceeds 6 fractional digits");
      return std::nullopt;
    }
    return value;
  }

 private:
  static std::string k(std::string_view key) { return std::string(key); }

  std::vector<ParseError>& errors_;
};

inline ExprPtr parse_formula(PlanReader& reader, const std::string& where,
                             std::string_view label, const std::string& src) {
  ExprParse parsed = parse_expr(src);
  if (!parsed.ok()) {
    reader.error(where, std::string(label) + " does not parse: " + parsed.error->message +
                            " (column " + std::to_string(parsed.error->column) + ")");
    return nullptr;
  }
  return parsed.expr;
}

inline std::optional<TargetBands> parse_targets(PlanReader& reader, const std::string& where,
                                                const nlohmann::json& obj) {
  if (!obj.is_object()) {
    reader.error(where, "'targets' must be an object");
    return std::nullopt;
  }
  if (!reader.check_keys(obj, where, {"excellent_at", "acceptable_at"}, {"direction"})) {
    return std::nullopt;
  }
  TargetBands bands;
  if (obj.contains("direction")) {
    auto text = reader.get_string(obj, where, "direction");
    if (!text) {
      return std::nullopt;
    }
    bands.direction = direction_from_name(*text);
    if (!bands.direction) {
      reader.error(where, "'direction' must be higher_better or lower_better");
      return std::nullopt;
    }
  }
  auto excellent = reader.get_number(obj, where, "excellent_at");
  auto acceptable = reader.get_number(obj, where, "acceptable_at");
  if (!excellent || !acceptable) {
    return std::nullopt;
  }
  bands.excellent_at = *excellent;
  bands.acceptable_at = *acceptable;
  if (bands.direction == Direction::higher_better && bands.excellent_at < bands.acceptable_at) {
    reader.error(where, "inverted target bands: higher_better requires excellent_at >= acceptable_at");
    return std::nullopt;
  }
  if (bands.direction == Direction::lower_better && bands.excellent_at > bands.acceptable_at) {
    reader.error(where, "inverted target bands: lower_better requires excellent_at <= acceptable_at");
    return std::nullopt;
  }
  return bands;
}

inline std::optional<Hypothesis> parse_hypothesis(PlanReader& reader, const std::string& where,
                                                  const nlohmann::json& obj) {
  if (!obj.is_object()) {
    reader.error(where, "'hypothesis' must be an object");
    return std::nullopt;
  }
  if (!reader.check_keys(obj, where, {"relation", "bound"})) {
    return std::nullopt;
  }
  Hypothesis hypothesis;
  auto relation = reader.get_string(obj, where, "relation");
  auto bound = reader.get_string(obj, where, "bound");
  if (!relation || !bound) {
    return std::nullopt;
  }
  if (*relation == "le") {
    hypothesis.relation = Relation::le;
  } else if (*relation == "ge") {
    hypothesis.relation = Relation::ge;
  } else {
    reader.error(where, "'relation' must be le or ge");
    return std::nullopt;
  }
  hypothesis.bound_source = *bound;
  hypothesis.bound = parse_formula(reader, where, "hypothesis bound", *bound);
  if (!hypothesis.bound) {
    return std::nullopt;
  }
  return hypothesis;
}

inline void parse_metric(PlanReader& reader, const nlohmann::json& obj, std::size_t index,
                         MeasurementPlan& plan, std::set<std::string>& metric_ids) {
  std::string where = "metrics[" + std::to_string(index) + "]";
  if (!obj.is_object()) {
    reader.error(where, "metric must be an object");
    return;
  }
  auto id = reader.get_string(obj, where, "metric_id");
  if (id && !id->empty()) {
    where = *id;
  }
  bool ok = reader.check_keys(obj, where,
                              {"metric_id", "name", "unit", "formula", "data_sources",
                               "collection_frequency", "responsible_role", "audience",
                               "review_note"},
                              {"targets", "hypothesis"});
  if (!id) {
    return;  // missing/mistyped metric_id already recorded
  }
  if (!id_matches_pattern(*id, 'M', true)) {
    reader.error(where, "metric_id '" + *id + "' does not match M<digits>.<digits>");
    ok = false;
  }
  if (!metric_ids.insert(*id).second) {
    reader.error(where, "duplicate metric_id " + *id);
    ok = false;
  }
  Metric metric;
  metric.metric_id = *id;
  auto name = reader.get_string(obj, where, "name");
  auto unit = reader.get_string(obj, where, "unit");
  auto formula = reader.get_string(obj, where, "formula");
  auto role = reader.get_string(obj, where, "responsible_role");
  auto audience = reader.get_string(obj, where, "audience");
  auto review = reader.get_string(obj, where, "review_note");
  auto frequency = reader.get_string(obj, where, "collection_frequency");
  if (!name || !unit || !formula || !role || !audience || !review || !frequency) {
    return;
  }
  metric.name = *name;
  metric.unit = *unit;
  metric.responsible_role = *role;
  metric.audience = *audience;
  metric.review_note = *review;
  if (*frequency == "per_period") {
    metric.collection_frequency = CollectionFrequency::per_period;
  } else if (*frequency == "on_event") {
    metric.collection_frequency = CollectionFrequency::on_event;
  } else {
    reader.error(where, "'collection_frequency' must be per_period or on_event");
    ok = false;
  }
  metric.formula_source = *formula;
  metric.formula = parse_formula(reader, where, "formula", *formula);
  ok = ok && metric.formula != nullptr;
  if (!obj.contains("data_sources") || !obj.at("data_sources").is_array()) {
    reader.error(where, "'data_sources' must be an array of evidence kinds");
    return;
  }
  for (const auto& entry : obj.at("data_sources")) {
    if (!entry.is_string()) {
      reader.error(where, "'data_sources' must contain strings");
      ok = false;
      continue;
    }
    std::string kind = entry.get<std::string>();
    if (find_kind(kind) == nullptr) {
      reader.error(where, "unknown evidence kind '" + kind + "' in data_sources");
      ok = false;
      continue;
    }
    metric.data_sources.push_back(std::move(kind));
  }
  if (obj.contains("targets")) {
    metric.targets = parse_targets(reader, where, obj.at("targets"));
    ok = ok && metric.targets.has_value();
  }
  if (obj.contains("hypothesis")) {
    metric.hypothesis = parse_hypothesis(reader, where, obj.at("hypothesis"));
    ok = ok && metric.hypothesis.has_value();
  }
  if (ok) {
    plan.metrics.push_back(std::move(metric));
  }
}

inline void parse_question(PlanReader& reader, const nlohmann::json& obj, const std::string& goal_where,
                           std::size_t index, Goal& goal, std::set<std::string>& question_ids) {
  std::string where = goal_where + ".questions[" + std::to_string(index) + "]";
  if (!obj.is_object()) {
    reader.error(where, "question must be an object");
    return;
  }
  auto id = reader.get_string(obj, where, "question_id");
  if (id && !id->empty()) {
    where = *id;
  }
  bool ok = reader.check_keys(obj, where, {"question_id", "text", "metric_refs"});
  if (!id) {
    return;  // missing/mistyped question_id already recorded
  }
  if (id->empty()) {
    reader.error(where, "question_id must be non-empty");
    return;
  }
  if (!question_ids.insert(*id).second) {
    reader.error(where, "duplicate question_id " + *id);
    ok = false;
  }
  Question question;
  question.question_id = *id;
  auto text = reader.get_string(obj, where, "text");
  if (!text) {
    return;
  }
  question.text = *text;
  if (!obj.contains("metric_refs") || !obj.at("metric_refs").is_array()) {
    reader.error(where, "'metric_refs' must be an array of metric ids");
    return;
  }
  for (const auto& entry : obj.at("metric_refs")) {
    if (!entry.is_string()) {
      reader.error(where, "'metric_refs' must contain strings");
      ok = false;
      continue;
    }
    question.metric_refs.push_back(entry.get<std::string>());
  }
  if (ok) {
    goal.questions.push_back(std::move(question));
  }
}

inline void parse_goal(PlanReader& reader, const nlohmann::json& obj, std::size_t index,
                       MeasurementPlan& plan, std::set<std::string>& goal_ids,
                       std::set<std::string>& question_ids) {
  std::string where = "goals[" + std::to_string(index) + "]";
  if (!obj.is_object()) {
    reader.error(where, "goal must be an object");
    return;
  }
  auto id = reader.get_string(obj, where, "goal_id");
  if (id && !id->empty()) {
    where = *id;
  }
  bool ok = reader.check_keys(obj, where,
                              {"goal_id", "control_ref", "objective", "business_goal", "questions"});
  if (!id) {
    return;  // missing/mistyped goal_id already recorded
  }
  if (!id_matches_pattern(*id, 'G', false)) {
    reader.error(where, "goal_id '" + *id + "' does not match G<digits>");
    ok = false;
  }
  if (!goal_ids.insert(*id).second) {
    reader.error(where, "duplicate goal_id " + *id);
    ok = false;
  }
  Goal goal;
  goal.goal_id = *id;
  auto control_ref = reader.get_string(obj, where, "control_ref");
  auto objective = reader.get_string(obj, where, "objective");
  auto business_goal = reader.get_string(obj, where, "business_goal");
  if (!control_ref || !objective || !business_goal) {
    return;
  }
  goal.control_ref = *control_ref;
  goal.objective = *objective;
  goal.business_goal = *business_goal;
  if (goal.objective.empty()) {
    reader.error(where, "objective must be non-empty");
    ok = false;
  }
  if (!obj.contains("questions") || !obj.at("questions").is_array()) {
    reader.error(where, "'questions' must be an array");
    return;
  }
  std::size_t question_index = 0;
  for (const auto& entry : obj.at("questions")) {
    parse_question(reader, entry, where, question_index++, goal, question_ids);
  }
  if (ok) {
    plan.goals.push_back(std::move(goal));
  }
}

}  // namespace detail

// Parses and structurally validates a plan document. Returns either a fully
// materialized plan or a non-empty error list, never both.
inline PlanParse parse_plan(std::string_view doc) {
  std::vector<ParseError> errors;
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(doc);
  } catch (const nlohmann::json::parse_error& e) {
    errors.push_back({"", e.what()});
    return {std::nullopt, std::move(errors)};
  }
  detail::PlanReader reader(errors);
  if (!root.is_object()) {
    reader.error("", "plan document must be a JSON object");
    return {std::nullopt, std::move(errors)};
  }
  reader.check_keys(root, "plan",
                    {"plan_id", "organization", "description", "period_policy", "parameters",
                     "metrics", "goals"});

  MeasurementPlan plan;
  if (auto plan_id = reader.get_string(root, "plan", "plan_id")) {
    plan.plan_id = *plan_id;
    if (plan.plan_id.empty()) {
      reader.error("plan", "plan_id must be non-empty");
    }
  }
  if (auto organization = reader.get_string(root, "plan", "organization")) {
    plan.organization = *organization;
  }
  if (auto description = reader.get_string(root, "plan", "description")) {
    plan.description = *description;
  }

  if (root.contains("period_policy") && root.at("period_policy").is_object()) {
    const auto& policy = root.at("period_policy");
    reader.check_keys(policy, "period_policy", {"granularity", "timezone_rule"});
    if (auto granularity = reader.get_string(policy, "period_policy", "granularity")) {
      auto parsed = granularity_from_name(*granularity);
      if (parsed) {
        plan.period_policy.granularity = *parsed;
      } else {
        reader.error("period_policy", "'granularity' must be month or quarter");
      }
    }
    if (auto rule = reader.get_string(policy, "period_policy", "timezone_rule")) {
      auto offset = parse_offset_designator(*rule);
      if (offset) {
        plan.period_policy.offset_seconds = *offset;
        plan.period_policy.offset_text = *rule;
      } else {
        reader.error("period_policy", "'timezone_rule' must be a fixed offset within +/-14:00");
      }
    }
  } else if (root.contains("period_policy")) {
    reader.error("plan", "'period_policy' must be an object");
  }

  if (root.contains("parameters") && root.at("parameters").is_object()) {
    for (const auto& [name, value] : root.at("parameters").items()) {
      if (name.empty()) {
        reader.error("parameters", "parameter name must be non-empty");
        continue;
      }
      if (!value.is_number()) {
        reader.error("parameters", "parameter '" + name + "' must be a number");
        continue;
      }
      double number = value.get<double>();
      if (!fits_six_places(number)) {
        reader.error("parameters", "parameter '" + name + "' exceeds 6 fractional digits");
        continue;
      }
      plan.parameters[name] = number;
    }
  } else if (root.contains("parameters")) {
    reader.error("plan", "'parameters' must be an object");
  }

  std::set<std::string> metric_ids;
  if (root.contains("metrics") && root.at("metrics").is_array()) {
    std::size_t index = 0;
    for (const auto& entry : root.at("metrics")) {
      detail::parse_metric(reader, entry, index++, plan, metric_ids);
    }
  } else if (root.contains("metrics")) {
    reader.error("plan", "'metrics' must be an array");
  }

  std::set<std::string> goal_ids;
  std::set<std::string> question_ids;
  if (root.contains("goals") && root.at("goals").is_array()) {
    std::size_t index = 0;
    for (const auto& entry : root.at("goals")) {
      detail::parse_goal(reader, entry, index++, plan, goal_ids, question_ids);
    }
  } else if (root.contains("goals")) {
    reader.error("plan", "'goals' must be an array");
  }

  // referential integrity of metric_refs
  for (const Goal& goal : plan.goals) {
    for (const Question& question : goal.questions) {
      for (const std::string& ref : question.metric_refs) {
        if (!metric_ids.contains(ref)) {
          reader.error(question.question_id, "unresolved metric_ref " + ref);
        }
      }
    }
  }

  if (!errors.empty()) {
    return {std::nullopt, std::move(errors)};
  }
  return {std::move(plan), {}};
}

// --- structural validation ---------------------------------------------------

struct StructureError {
  std::string subject;
  std::string message;

  std::string to_string() const { return message + " at " + subject; }

  friend bool operator==(const StructureError&, const StructureError&) = default;
};

// Hierarchy checks beyond parsing: every metric answers at least one
// question, every question has metrics, formulas and hypothesis bounds
// typecheck, and formulas only touch evidence kinds the metric declares.
inline std::vector<StructureError> validate_structure(const MeasurementPlan& plan) {
  std::vector<StructureError> errors;
  auto parameters = plan.parameter_names();

  std::set<std::string> referenced;
  for (const Goal& goal : plan.goals) {
    for (const Question& question : goal.questions) {
      if (question.metric_refs.empty()) {
        errors.push_back({question.question_id, "question has no metrics"});
      }
      for (const std::string& ref : question.metric_refs) {
        referenced.insert(ref);
        if (plan.find_metric(ref) == nullptr) {
          errors.push_back({question.question_id, "unresolved metric_ref " + ref});
        }
      }
    }
  }

  for (const Metric& metric : plan.metrics) {
    if (!referenced.contains(metric.metric_id)) {
      errors.push_back({metric.metric_id, "orphan metric: defined but never referenced"});
    }
    if (metric.formula) {
      for (const TypeError& err : typecheck(*metric.formula, parameters)) {
        errors.push_back({metric.metric_id, err.message});
      }
      std::set<std::string> kinds;
      collect_kinds(*metric.formula, kinds);
      for (const std::string& kind : kinds) {
        bool declared = false;
        for (const std::string& source : metric.data_sources) {
          declared = declared || source == kind;
        }
        if (!declared) {
          errors.push_back({metric.metric_id,
                            "formula uses evidence kind '" + kind + "' not declared in data_sources"});
        }
      }
    }
    if (metric.hypothesis && metric.hypothesis->bound) {
      for (const TypeError& err : typecheck(*metric.hypothesis->bound, parameters)) {
        errors.push_back({metric.metric_id, "hypothesis bound: " + err.message});
      }
    }
  }
  return errors;
}

// --- canonical serialization --------------------------------------------------

// Deterministic document form: fixed key order, parameters sorted by name,
// formulas re-printed canonically, canonical numbers, newline-terminated.
inline std::string canonicalize(const MeasurementPlan& plan) {
  JsonWriter w(JsonWriter::Layout::pretty);
  w.begin_object();
  w.key("plan_id");
  w.string_value(plan.plan_id);
  w.key("organization");
  w.string_value(plan.organization);
  w.key("description");
  w.string_value(plan.description);
  w.key("period_policy");
  w.begin_object();
  w.key("granularity");
  w.string_value(granularity_name(plan.period_policy.granularity));
  w.key("timezone_rule");
  w.string_value(plan.period_policy.offset_text);
  w.end_object();
  w.key("parameters");
  w.begin_object();
  for (const auto& [name, value] : plan.parameters) {
    w.key(name);
    w.number_value(value);
  }
  w.end_object();
  w.key("metrics");
  w.begin_array();
  for (const Metric& metric : plan.metrics) {
    w.begin_object();
    w.key("metric_id");
    w.string_value(metric.metric_id);
    w.key("name");
    w.string_value(metric.name);
    w.key("unit");
    w.string_value(metric.unit);
    w.key("formula");
    w.string_value(metric.formula ? print_expr(*metric.formula) : metric.formula_source);
    w.key("data_sources");
    w.begin_array();
    for (const std::string& source : metric.data_sources) {
      w.string_value(source);
    }
    w.end_array();
    w.key("collection_frequency");
    w.string_value(collection_frequency_name(metric.collection_frequency));
    w.key("responsible_role");
    w.string_value(metric.responsible_role);
    w.key("audience");
    w.string_value(metric.audience);
    if (metric.targets) {
      w.key("targets");
      w.begin_object();
      if (metric.targets->direction) {
        w.key("direction");
        w.string_value(direction_name(*metric.targets->direction));
      }
      w.key("excellent_at");
      w.number_value(metric.targets->excellent_at);
      w.key("acceptable_at");
      w.number_value(metric.targets->acceptable_at);
      w.end_object();
    }
    if (metric.hypothesis) {
      w.key("hypothesis");
      w.begin_object();
      w.key("relation");
      w.string_value(relation_name(metric.hypothesis->relation));
      w.key("bound");
      w.string_value(metric.hypothesis->bound ? print_expr(*metric.hypothesis->bound)
                                              : metric.hypothesis->bound_source);
      w.end_object();
    }
    w.key("review_note");
    w.string_value(metric.review_note);
    w.end_object();
  }
  w.end_array();
  w.key("goals");
  w.begin_array();
  for (const Goal& goal : plan.goals) {
    w.begin_object();
    w.key("goal_id");
    w.string_value(goal.goal_id);
    w.key("control_ref");
    w.string_value(goal.control_ref);
    w.key("objective");
    w.string_value(goal.objective);
    w.key("business_goal");
    w.string_value(goal.business_goal);
    w.key("questions");
    w.begin_array();
    for (const Question& question : goal.questions) {
      w.begin_object();
      w.key("question_id");
      w.string_value(question.question_id);
      w.key("text");
      w.string_value(question.text);
      w.key("metric_refs");
      w.begin_array();
      for (const std::string& ref : question.metric_refs) {
        w.string_value(ref);
      }
      w.end_array();
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.take();
}

}  // namespace gqm
