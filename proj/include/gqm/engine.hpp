#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gqm/eval.hpp"
#include "gqm/json_writer.hpp"
#include "gqm/plan.hpp"
#include "gqm/store.hpp"

namespace gqm {

// Total order used for every rollup. Unknown sits between Unacceptable and
// Acceptable: missing data blocks a claim of acceptability, but a confirmed
// violation is strictly worse.
enum class Status {
  unacceptable = 0,
  unknown = 1,
  acceptable = 2,
  excellent = 3,
};

inline std::string_view status_name(Status s) {
  switch (s) {
    case Status::unacceptable: return "unacceptable";
    case Status::unknown: return "unknown";
    case Status::acceptable: return "acceptable";
    case Status::excellent: return "excellent";
  }
  return "?";
}

inline std::optional<Status> status_from_name(std::string_view s) {
  if (s == "unacceptable") return Status::unacceptable;
  if (s == "unknown") return Status::unknown;
  if (s == "acceptable") return Status::acceptable;
  if (s == "excellent") return Status::excellent;
  return std::nullopt;
}

// Band classification with inclusive cuts toward the better band. Undefined
// values and metrics without usable targets classify as Unknown.
inline Status classify(const EvalOutcome& outcome, const std::optional<TargetBands>& targets) {
  if (!outcome.is_value() || !targets || !targets->direction) {
    return Status::unknown;
  }
  double v = outcome.value();
  if (*targets->direction == Direction::higher_better) {
    if (v >= targets->excellent_at) {
      return Status::excellent;
    }
    return v >= targets->acceptable_at ? Status::acceptable : Status::unacceptable;
  }
  if (v <= targets->excellent_at) {
    return Status::excellent;
  }
  return v <= targets->acceptable_at ? Status::acceptable : Status::unacceptable;
}

// Worst-of rollup: the minimum under the Status order.
inline Status aggregate_status(std::span<const Status> children) {
  if (children.empty()) {
    throw std::invalid_argument("aggregate_status requires a non-empty status list");
  }
  Status worst = children.front();
  for (Status s : children) {
    if (static_cast<int>(s) < static_cast<int>(worst)) {
      worst = s;
    }
  }
  return worst;
}

enum class HypothesisVerdict { supported, rejected, indeterminate, none };

inline std::string_view verdict_name(HypothesisVerdict v) {
  switch (v) {
    case HypothesisVerdict::supported: return "supported";
    case HypothesisVerdict::rejected: return "rejected";
    case HypothesisVerdict::indeterminate: return "indeterminate";
    case HypothesisVerdict::none: return "none";
  }
  return "?";
}

inline std::optional<HypothesisVerdict> verdict_from_name(std::string_view s) {
  if (s == "supported") return HypothesisVerdict::supported;
  if (s == "rejected") return HypothesisVerdict::rejected;
  if (s == "indeterminate") return HypothesisVerdict::indeterminate;
  if (s == "none") return HypothesisVerdict::none;
  return std::nullopt;
}

// Inclusive comparison of the metric value against the hypothesis bound,
// evaluated in the same context. Any Undefined side is indeterminate.
inline HypothesisVerdict test_hypothesis(const EvalOutcome& outcome, const Hypothesis& hypothesis,
                                         const EvalContext& ctx) {
  if (!outcome.is_value() || !hypothesis.bound) {
    return HypothesisVerdict::indeterminate;
  }
  EvalOutcome bound = evaluate(*hypothesis.bound, ctx);
  if (!bound.is_value()) {
    return HypothesisVerdict::indeterminate;
  }
  bool holds = hypothesis.relation == Relation::le ? outcome.value() <= bound.value()
                                                   : outcome.value() >= bound.value();
  return holds ? HypothesisVerdict::supported : HypothesisVerdict::rejected;
}

struct MetricResult {
  std::string metric_id;
  std::string period;
  EvalOutcome outcome = EvalOutcome::undefined("not computed");
  Status status = Status::unknown;
  HypothesisVerdict verdict = HypothesisVerdict::none;
};

// One period's full measurement: a result per plan metric in declaration
// order, question and goal statuses from the worst-of rollup, the evidence
// snapshot digest, and the period's end instant as the run timestamp, so
// that identical inputs serialize to identical bytes.
struct MeasurementRun {
  std::string plan_id;
  std::string period;
  std::string evidence_digest;
  std::string run_timestamp;
  std::vector<MetricResult> metric_results;
  std::vector<std::pair<std::string, Status>> question_statuses;
  std::vector<std::pair<std::string, Status>> goal_statuses;

  const MetricResult* find_result(std::string_view metric_id) const {
    for (const MetricResult& result : metric_results) {
      if (result.metric_id == metric_id) {
        return &result;
      }
    }
    return nullptr;
  }
};

inline MetricResult compute_metric(const MeasurementPlan& plan, const Metric& metric,
                                   const EvidenceStore& store, std::string_view period) {
  MetricResult result;
  result.metric_id = metric.metric_id;
  result.period = std::string(period);
  EvalContext ctx{&plan.parameters, store.period_records(period)};
  result.outcome = metric.formula ? evaluate(*metric.formula, ctx)
                                  : EvalOutcome::undefined("formula missing");
  result.status = classify(result.outcome, metric.targets);
  result.verdict = metric.hypothesis ? test_hypothesis(result.outcome, *metric.hypothesis, ctx)
                                     : HypothesisVerdict::none;
  return result;
}

inline MetricResult compute_metric(const MeasurementPlan& plan, std::string_view metric_id,
                                   const EvidenceStore& store, std::string_view period) {
  const Metric* metric = plan.find_metric(metric_id);
  if (metric == nullptr) {
    throw std::invalid_argument("unknown metric " + std::string(metric_id));
  }
  return compute_metric(plan, *metric, store, period);
}

inline MeasurementRun run_measurement(const MeasurementPlan& plan, const EvidenceStore& store,
                                      std::string_view period) {
  if (!period_id_valid(period, plan.period_policy.granularity)) {
    throw std::invalid_argument("malformed period id '" + std::string(period) + "'");
  }
  MeasurementRun run;
  run.plan_id = plan.plan_id;
  run.period = std::string(period);
  run.evidence_digest = store.snapshot_digest(period);
  run.run_timestamp = format_instant_utc(period_end_epoch(period, plan.period_policy));
  for (const Metric& metric : plan.metrics) {
    run.metric_results.push_back(compute_metric(plan, metric, store, period));
  }
  for (const Goal& goal : plan.goals) {
    std::vector<Status> question_statuses;
    for (const Question& question : goal.questions) {
      std::vector<Status> metric_statuses;
      for (const std::string& ref : question.metric_refs) {
        if (const MetricResult* result = run.find_result(ref)) {
          metric_statuses.push_back(result->status);
        }
      }
      Status status = aggregate_status(metric_statuses);
      run.question_statuses.emplace_back(question.question_id, status);
      question_statuses.push_back(status);
    }
    run.goal_statuses.emplace_back(goal.goal_id, aggregate_status(question_statuses));
  }
  return run;
}

// --- run document -------------------------------------------------------------

// Canonical run document (`<plan_id>.<period>.run.json`): fixed key order,
// results in plan declaration order.
inline std::string serialize_run(const MeasurementRun& run) {
  JsonWriter w(JsonWriter::Layout::pretty);
  w.begin_object();
  w.key("plan_id");
  w.string_value(run.plan_id);
  w.key("period");
  w.string_value(run.period);
  w.key("evidence_digest");
  w.string_value(run.evidence_digest);
  w.key("run_timestamp");
  w.string_value(run.run_timestamp);
  w.key("metric_results");
  w.begin_array();
  for (const MetricResult& result : run.metric_results) {
    w.begin_object();
    w.key("metric_id");
    w.string_value(result.metric_id);
    if (result.outcome.is_value()) {
      w.key("value");
      w.number_value(result.outcome.value());
    } else {
      w.key("undefined");
      w.string_value(result.outcome.reason());
    }
    w.key("status");
    w.string_value(status_name(result.status));
    w.key("hypothesis_verdict");
    w.string_value(verdict_name(result.verdict));
    w.end_object();
  }
  w.end_array();
  w.key("question_statuses");
  w.begin_array();
  for (const auto& [question_id, status] : run.question_statuses) {
    w.begin_object();
    w.key("question_id");
    w.string_value(question_id);
    w.key("status");
    w.string_value(status_name(status));
    w.end_object();
  }
  w.end_array();
  w.key("goal_statuses");
  w.begin_array();
  for (const auto& [goal_id, status] : run.goal_statuses) {
    w.begin_object();
    w.key("goal_id");
    w.string_value(goal_id);
    w.key("status");
    w.string_value(status_name(status));
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.take();
}

struct RunParse {
  std::optional<MeasurementRun> run;
  std::string error;

  bool ok() const { return run.has_value(); }
};

inline RunParse parse_run(std::string_view doc) {
  auto fail = [](std::string msg) { return RunParse{std::nullopt, std::move(msg)}; };
  nlohmann::json root = nlohmann::json::parse(doc, nullptr, false);
  if (root.is_discarded() || !root.is_object()) {
    return fail("malformed run document");
  }
  MeasurementRun run;
  for (const char* key : {"plan_id", "period", "evidence_digest", "run_timestamp"}) {
    if (!root.contains(key) || !root.at(key).is_string()) {
      return fail(std::string("missing or invalid '") + key + "'");
    }
  }
  run.plan_id = root.at("plan_id").get<std::string>();
  run.period = root.at("period").get<std::string>();
  run.evidence_digest = root.at("evidence_digest").get<std::string>();
  run.run_timestamp = root.at("run_timestamp").get<std::string>();
  if (!root.contains("metric_results") || !root.at("metric_results").is_array()) {
    return fail("missing or invalid 'metric_results'");
  }
  for (const auto& entry : root.at("metric_results")) {
    if (!entry.is_object() || !entry.contains("metric_id") || !entry.contains("status") ||
        !entry.contains("hypothesis_verdict")) {
      return fail("malformed metric result");
    }
    MetricResult result;
    result.metric_id = entry.at("metric_id").get<std::string>();
    result.period = run.period;
    if (entry.contains("value") && entry.at("value").is_number()) {
      result.outcome = EvalOutcome::value(entry.at("value").get<double>());
    } else if (entry.contains("undefined") && entry.at("undefined").is_string()) {
      result.outcome = EvalOutcome::undefined(entry.at("undefined").get<std::string>());
    } else {
      return fail("metric result needs 'value' or 'undefined'");
    }
    auto status = status_from_name(entry.at("status").get<std::string>());
    auto verdict = verdict_from_name(entry.at("hypothesis_verdict").get<std::string>());
    if (!status || !verdict) {
      return fail("malformed status or verdict in metric result");
    }
    result.status = *status;
    result.verdict = *verdict;
    run.metric_results.push_back(std::move(result));
  }
  auto read_statuses = [&](const char* key, const char* id_key,
                           std::vector<std::pair<std::string, Status>>& out) {
    if (!root.contains(key) || !root.at(key).is_array()) {
      return false;
    }
    for (const auto& entry : root.at(key)) {
      if (!entry.is_object() || !entry.contains(id_key) || !entry.contains("status")) {
        return false;
      }
      auto status = status_from_name(entry.at("status").get<std::string>());
      if (!status) {
        return false;
      }
      out.emplace_back(entry.at(id_key).get<std::string>(), *status);
    }
    return true;
  };
  if (!read_statuses("question_statuses", "question_id", run.question_statuses)) {
    return fail("missing or invalid 'question_statuses'");
  }
  if (!read_statuses("goal_statuses", "goal_id", run.goal_statuses)) {
    return fail("missing or invalid 'goal_statuses'");
  }
  return {std::move(run), {}};
}

// --- trends --------------------------------------------------------------------

enum class TrendAssessment { improving, degrading, flat, insufficient_data };

inline std::string_view trend_assessment_name(TrendAssessment a) {
  switch (a) {
    case TrendAssessment::improving: return "improving";
    case TrendAssessment::degrading: return "degrading";
    case TrendAssessment::flat: return "flat";
    case TrendAssessment::insufficient_data: return "insufficient_data";
  }
  return "?";
}

struct TrendSeries {
  std::string metric_id;
  std::vector<std::pair<std::string, EvalOutcome>> points;  // (period, outcome)
  TrendAssessment assessment = TrendAssessment::insufficient_data;
};

// Endpoint comparison of the first and last defined values, read under the
// metric's better-direction. Fewer than two defined values cannot be
// assessed.
inline TrendSeries trend(std::span<const MeasurementRun> runs, const MeasurementPlan& plan,
                         std::string_view metric_id) {
  TrendSeries series;
  series.metric_id = std::string(metric_id);
  std::vector<double> values;
  for (const MeasurementRun& run : runs) {
    const MetricResult* result = run.find_result(metric_id);
    if (result == nullptr) {
      continue;
    }
    series.points.emplace_back(run.period, result->outcome);
    if (result->outcome.is_value()) {
      values.push_back(result->outcome.value());
    }
  }
  const Metric* metric = plan.find_metric(metric_id);
  std::optional<Direction> direction;
  if (metric != nullptr && metric->targets) {
    direction = metric->targets->direction;
  }
  if (values.size() < 2 || !direction) {
    series.assessment = TrendAssessment::insufficient_data;
    return series;
  }
  double first = values.front();
  double last = values.back();
  if (first == last) {
    series.assessment = TrendAssessment::flat;
  } else {
    bool better = *direction == Direction::higher_better ? last > first : last < first;
    series.assessment = better ? TrendAssessment::improving : TrendAssessment::degrading;
  }
  return series;
}

}  // namespace gqm
