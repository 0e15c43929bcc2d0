#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gqm/engine.hpp"
#include "gqm/json_writer.hpp"
#include "gqm/plan.hpp"

namespace gqm {

enum class ReportFormat { markdown, machine };

inline std::optional<ReportFormat> report_format_from_name(std::string_view s) {
  if (s == "markdown") return ReportFormat::markdown;
  if (s == "machine") return ReportFormat::machine;
  return std::nullopt;
}

namespace detail {

// Fixed template per status; free text would break reproducibility.
inline std::string_view interpretation_note(Status status) {
  switch (status) {
    case Status::excellent:
      return "Value meets the excellent target; sustain the current controls.";
    case Status::acceptable:
      return "Value is within the acceptable range; monitor for regression.";
    case Status::unacceptable:
      return "Value is outside the acceptable range; apply the metric's review action.";
    case Status::unknown:
      return "Value could not be computed for this period; collect the missing evidence.";
  }
  return "";
}

inline constexpr std::string_view kAggregationRule =
    "question and goal statuses are the worst of their children "
    "(minimum under unacceptable < unknown < acceptable < excellent)";

inline std::string md_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') {
      out += '\\';
    }
    out += c;
  }
  return out;
}

inline std::string outcome_text(const EvalOutcome& outcome) {
  if (outcome.is_value()) {
    return format_decimal(outcome.value());
  }
  return "undefined: " + outcome.reason();
}

inline std::string targets_text(const std::optional<TargetBands>& targets) {
  if (!targets) {
    return "not specified";
  }
  std::string excellent = format_decimal(targets->excellent_at);
  std::string acceptable = format_decimal(targets->acceptable_at);
  if (!targets->direction) {
    return "excellent_at " + excellent + ", acceptable_at " + acceptable + " (no direction)";
  }
  std::string_view cmp = *targets->direction == Direction::higher_better ? ">=" : "<=";
  return std::string(direction_name(*targets->direction)) + ": excellent " + std::string(cmp) +
         " " + excellent + ", acceptable " + std::string(cmp) + " " + acceptable;
}

inline std::string hypothesis_text(const Metric& metric, HypothesisVerdict verdict) {
  if (!metric.hypothesis) {
    return "none";
  }
  std::string_view cmp = metric.hypothesis->relation == Relation::le ? "<=" : ">=";
  std::string bound = metric.hypothesis->bound ? print_expr(*metric.hypothesis->bound)
                                               : metric.hypothesis->bound_source;
  return "value " + std::string(cmp) + " " + bound + ": " + std::string(verdict_name(verdict));
}

inline std::string joined_sources(const Metric& metric) {
  if (metric.data_sources.empty()) {
    return "none";
  }
  std::string out;
  for (const std::string& source : metric.data_sources) {
    if (!out.empty()) {
      out += ", ";
    }
    out += source;
  }
  return out;
}

inline void check_run_matches_plan(const MeasurementRun& run, const MeasurementPlan& plan) {
  if (run.plan_id != plan.plan_id) {
    throw std::invalid_argument("run belongs to plan '" + run.plan_id + "', not '" +
                                plan.plan_id + "'");
  }
  for (const Metric& metric : plan.metrics) {
    if (run.find_result(metric.metric_id) == nullptr) {
      throw std::invalid_argument("run has no result for metric " + metric.metric_id);
    }
  }
}

inline Status lookup_status(const std::vector<std::pair<std::string, Status>>& statuses,
                            std::string_view id) {
  for (const auto& [sid, status] : statuses) {
    if (sid == id) {
      return status;
    }
  }
  return Status::unknown;
}

inline std::string render_construct_markdown(const MeasurementRun& run,
                                             const MeasurementPlan& plan) {
  std::string out;
  out += "# Measurement report: " + run.plan_id + " / " + run.period + "\n\n";
  out += "- Organization: " + plan.organization + "\n";
  out += "- Period: " + run.period + "\n";
  out += "- Evidence digest: " + run.evidence_digest + "\n";
  out += "- Run timestamp: " + run.run_timestamp + "\n";
  out += "- Aggregation rule: " + std::string(kAggregationRule) + "\n";
  for (const Goal& goal : plan.goals) {
    out += "\n## " + goal.goal_id + " " + goal.control_ref + ": " + goal.objective + "\n\n";
    out += "Status: " + std::string(status_name(lookup_status(run.goal_statuses, goal.goal_id))) +
           "\n";
    for (const Question& question : goal.questions) {
      out += "\n### " + question.question_id + ": " + question.text + "\n\n";
      out += "Status: " +
             std::string(status_name(lookup_status(run.question_statuses, question.question_id))) +
             "\n";
      for (const std::string& ref : question.metric_refs) {
        const Metric* metric = plan.find_metric(ref);
        const MetricResult* result = run.find_result(ref);
        if (metric == nullptr || result == nullptr) {
          continue;
        }
        out += "\n#### " + metric->metric_id + ": " + md_escape(metric->name) + "\n\n";
        out += "| Field | Value |\n| --- | --- |\n";
        auto row = [&](std::string_view field, std::string_view value) {
          out += "| ";
          out += field;
          out += " | ";
          out += md_escape(value);
          out += " |\n";
        };
        row("Control objective", goal.control_ref + ": " + goal.objective);
        row("Question", question.text);
        row("Formula", metric->formula ? print_expr(*metric->formula) : metric->formula_source);
        row("Unit", metric->unit);
        row("Data sources", joined_sources(*metric));
        row("Collection frequency", collection_frequency_name(metric->collection_frequency));
        row("Responsible role", metric->responsible_role);
        row("Audience", metric->audience);
        row("Value", outcome_text(result->outcome));
        row("Targets", targets_text(metric->targets));
        row("Status", status_name(result->status));
        row("Hypothesis", hypothesis_text(*metric, result->verdict));
        row("Interpretation", interpretation_note(result->status));
      }
    }
  }
  return out;
}

inline std::string render_construct_machine(const MeasurementRun& run,
                                            const MeasurementPlan& plan) {
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
  w.key("aggregation_rule");
  w.string_value(kAggregationRule);
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
    w.key("status");
    w.string_value(status_name(lookup_status(run.goal_statuses, goal.goal_id)));
    w.key("questions");
    w.begin_array();
    for (const Question& question : goal.questions) {
      w.begin_object();
      w.key("question_id");
      w.string_value(question.question_id);
      w.key("text");
      w.string_value(question.text);
      w.key("status");
      w.string_value(status_name(lookup_status(run.question_statuses, question.question_id)));
      w.key("entries");
      w.begin_array();
      for (const std::string& ref : question.metric_refs) {
        const Metric* metric = plan.find_metric(ref);
        const MetricResult* result = run.find_result(ref);
        if (metric == nullptr || result == nullptr) {
          continue;
        }
        w.begin_object();
        w.key("metric_id");
        w.string_value(metric->metric_id);
        w.key("name");
        w.string_value(metric->name);
        w.key("formula");
        w.string_value(metric->formula ? print_expr(*metric->formula) : metric->formula_source);
        w.key("unit");
        w.string_value(metric->unit);
        w.key("data_sources");
        w.begin_array();
        for (const std::string& source : metric->data_sources) {
          w.string_value(source);
        }
        w.end_array();
        w.key("collection_frequency");
        w.string_value(collection_frequency_name(metric->collection_frequency));
        w.key("responsible_role");
        w.string_value(metric->responsible_role);
        w.key("audience");
        w.string_value(metric->audience);
        if (result->outcome.is_value()) {
          w.key("value");
          w.number_value(result->outcome.value());
        } else {
          w.key("undefined");
          w.string_value(result->outcome.reason());
        }
        w.key("targets");
        w.string_value(targets_text(metric->targets));
        w.key("status");
        w.string_value(status_name(result->status));
        w.key("hypothesis");
        w.string_value(hypothesis_text(*metric, result->verdict));
        w.key("interpretation");
        w.string_value(interpretation_note(result->status));
        w.end_object();
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

}  // namespace detail

// ISO/IEC 27004-style measurement-construct report: one fully populated
// entry per metric, grouped by goal and question in plan order. Byte
// deterministic for a given (run, plan, format).
inline std::string render_construct(const MeasurementRun& run, const MeasurementPlan& plan,
                                    ReportFormat format) {
  detail::check_run_matches_plan(run, plan);
  return format == ReportFormat::markdown ? detail::render_construct_markdown(run, plan)
                                          : detail::render_construct_machine(run, plan);
}

// Per-metric row of period values plus an assessment word.
inline std::string render_trend(std::span<const TrendSeries> series, ReportFormat format) {
  if (series.empty()) {
    throw std::invalid_argument("render_trend requires at least one series");
  }
  if (format == ReportFormat::markdown) {
    std::string out = "# Trend report\n\n| Metric |";
    for (const auto& [period, outcome] : series.front().points) {
      out += " " + period + " |";
    }
    out += " Assessment |\n| --- |";
    for (std::size_t i = 0; i < series.front().points.size(); ++i) {
      out += " --- |";
    }
    out += " --- |\n";
    for (const TrendSeries& s : series) {
      out += "| " + s.metric_id + " |";
      for (const auto& [period, outcome] : s.points) {
        out += " " + detail::md_escape(detail::outcome_text(outcome)) + " |";
      }
      out += " " + std::string(trend_assessment_name(s.assessment)) + " |\n";
    }
    return out;
  }
  JsonWriter w(JsonWriter::Layout::pretty);
  w.begin_object();
  w.key("periods");
  w.begin_array();
  for (const auto& [period, outcome] : series.front().points) {
    w.string_value(period);
  }
  w.end_array();
  w.key("series");
  w.begin_array();
  for (const TrendSeries& s : series) {
    w.begin_object();
    w.key("metric_id");
    w.string_value(s.metric_id);
    w.key("points");
    w.begin_array();
    for (const auto& [period, outcome] : s.points) {
      w.begin_object();
      w.key("period");
      w.string_value(period);
      if (outcome.is_value()) {
        w.key("value");
        w.number_value(outcome.value());
      } else {
        w.key("undefined");
        w.string_value(outcome.reason());
      }
      w.end_object();
    }
    w.end_array();
    w.key("assessment");
    w.string_value(trend_assessment_name(s.assessment));
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.take();
}

// Metrics whose status changed between two runs of the same plan, with the
// value delta where both outcomes are defined.
inline std::string diff_runs(const MeasurementRun& run_a, const MeasurementRun& run_b) {
  if (run_a.plan_id != run_b.plan_id) {
    throw std::invalid_argument("cannot diff runs of different plans: '" + run_a.plan_id +
                                "' vs '" + run_b.plan_id + "'");
  }
  std::string out =
      "# Run diff: " + run_a.plan_id + " " + run_a.period + " -> " + run_b.period + "\n\n";
  std::size_t changes = 0;
  for (const MetricResult& before : run_a.metric_results) {
    const MetricResult* after = run_b.find_result(before.metric_id);
    if (after == nullptr || after->status == before.status) {
      continue;
    }
    ++changes;
    out += "- " + before.metric_id + ": " + std::string(status_name(before.status)) + " -> " +
           std::string(status_name(after->status));
    if (before.outcome.is_value() && after->outcome.is_value()) {
      out += " (value " + format_decimal(before.outcome.value()) + " -> " +
             format_decimal(after->outcome.value()) + ", delta " +
             format_decimal(after->outcome.value() - before.outcome.value()) + ")";
    }
    out += "\n";
  }
  if (changes == 0) {
    out += "no changes\n";
  }
  return out;
}

}  // namespace gqm
