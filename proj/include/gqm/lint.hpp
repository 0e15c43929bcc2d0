#pragma once

#include <algorithm>
#include <array>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gqm/json_writer.hpp"
#include "gqm/plan.hpp"

namespace gqm {

// The eight effective-security-metric criteria, one rule family each:
//   a  objectives and target bands       e  corrective action & timeliness
//   b  quantifiable unit                 f  targeted audience
//   c  measurement procedure             g  improvement direction
//   d  reproducible formula              h  business alignment
// a-d and f are structurally checkable and report errors; e, g and h concern
// organizational follow-through and report warnings.
enum class Criterion { a, b, c, d, e, f, g, h };

inline char criterion_letter(Criterion c) {
  return static_cast<char>('a' + static_cast<int>(c));
}

enum class Severity { error, warning };

inline std::string_view severity_name(Severity s) {
  return s == Severity::error ? "ERROR" : "WARNING";
}

struct Finding {
  Criterion criterion = Criterion::a;
  Severity severity = Severity::error;
  std::string subject;  // plan element id
  std::string message;

  friend bool operator==(const Finding&, const Finding&) = default;
};

namespace detail {

inline void lint_goal(const Goal& goal, std::vector<Finding>& findings) {
  if (goal.control_ref.empty()) {
    findings.push_back({Criterion::a, Severity::error, goal.goal_id,
                        "goal has no control objective reference"});
  }
  if (goal.objective.empty()) {
    findings.push_back({Criterion::a, Severity::error, goal.goal_id, "goal objective is empty"});
  }
  if (goal.business_goal.empty()) {
    findings.push_back({Criterion::h, Severity::warning, goal.goal_id,
                        "goal names no business goal it supports"});
  }
}

inline void lint_metric(const Metric& metric, const MeasurementPlan& plan,
                        std::vector<Finding>& findings) {
  const std::string& id = metric.metric_id;
  // (a) classification needs complete target bands
  if (!metric.targets) {
    findings.push_back({Criterion::a, Severity::error, id,
                        "metric has no target bands (excellent/acceptable cuts)"});
  }
  // (b) quantifiable: unambiguous unit, numeric formula
  if (metric.unit.empty()) {
    findings.push_back({Criterion::b, Severity::error, id, "metric has no unit of measure"});
  }
  if (!metric.formula) {
    findings.push_back({Criterion::b, Severity::error, id, "metric formula does not parse"});
  }
  // (c) a collection procedure: data sources and a responsible role
  if (metric.data_sources.empty()) {
    findings.push_back({Criterion::c, Severity::error, id, "metric declares no data sources"});
  }
  if (metric.responsible_role.empty()) {
    findings.push_back({Criterion::c, Severity::error, id,
                        "metric names no responsible role for collection"});
  }
  // (d) reproducibility: only built-ins over defined parameters
  if (metric.formula) {
    std::set<std::string> params;
    collect_params(*metric.formula, params);
    if (metric.hypothesis && metric.hypothesis->bound) {
      collect_params(*metric.hypothesis->bound, params);
    }
    for (const std::string& name : params) {
      if (!plan.parameters.contains(name)) {
        findings.push_back({Criterion::d, Severity::error, id,
                            "formula references undefined parameter '" + name +
                                "'; results would not be reproducible"});
      }
    }
  }
  // (e) corrective action and timeliness
  if (metric.review_note.empty()) {
    findings.push_back({Criterion::e, Severity::warning, id,
                        "metric has no review note describing the corrective action"});
  }
  // (f) targeted audience
  if (metric.audience.empty()) {
    findings.push_back({Criterion::f, Severity::error, id, "metric names no audience"});
  }
  // (g) improvement tracking needs a better-direction
  if (metric.targets && !metric.targets->direction) {
    findings.push_back({Criterion::g, Severity::warning, id,
                        "target bands carry no direction; trends cannot be assessed"});
  }
}

}  // namespace detail

// Pure, deterministic lint of a structurally valid plan. Findings are
// ordered by (criterion, subject id).
inline std::vector<Finding> lint_plan(const MeasurementPlan& plan) {
  std::vector<Finding> findings;
  for (const Goal& goal : plan.goals) {
    detail::lint_goal(goal, findings);
  }
  for (const Metric& metric : plan.metrics) {
    detail::lint_metric(metric, plan, findings);
  }
  std::sort(findings.begin(), findings.end(), [](const Finding& x, const Finding& y) {
    if (x.criterion != y.criterion) {
      return static_cast<int>(x.criterion) < static_cast<int>(y.criterion);
    }
    if (x.subject != y.subject) {
      return x.subject < y.subject;
    }
    return x.message < y.message;
  });
  return findings;
}

struct CriterionMatrix {
  struct Cell {
    bool pass = true;
    int errors = 0;
    int warnings = 0;
  };

  std::array<Cell, 8> cells;  // indexed by criterion a..h

  const Cell& cell(Criterion c) const { return cells[static_cast<std::size_t>(c)]; }
};

// Pass/fail per criterion: fail iff at least one error-severity finding.
inline CriterionMatrix criterion_matrix(std::span<const Finding> findings) {
  CriterionMatrix matrix;
  for (const Finding& finding : findings) {
    auto& cell = matrix.cells[static_cast<std::size_t>(finding.criterion)];
    if (finding.severity == Severity::error) {
      cell.errors += 1;
      cell.pass = false;
    } else {
      cell.warnings += 1;
    }
  }
  return matrix;
}

// Text lines: `LEVEL criterion=<a-h> subject=<id> message`.
inline std::string render_findings(std::span<const Finding> findings) {
  std::string out;
  for (const Finding& finding : findings) {
    out += severity_name(finding.severity);
    out += " criterion=";
    out += criterion_letter(finding.criterion);
    out += " subject=";
    out += finding.subject;
    out += ' ';
    out += finding.message;
    out += '\n';
  }
  return out;
}

inline std::string render_matrix(const CriterionMatrix& matrix) {
  std::string out = "criterion  result  errors  warnings\n";
  for (int i = 0; i < 8; ++i) {
    const auto& cell = matrix.cells[static_cast<std::size_t>(i)];
    out += static_cast<char>('a' + i);
    out += cell.pass ? "          pass    " : "          FAIL    ";
    out += std::to_string(cell.errors);
    out += "       ";
    out += std::to_string(cell.warnings);
    out += '\n';
  }
  return out;
}

// Machine-readable findings document.
inline std::string serialize_findings(std::span<const Finding> findings) {
  JsonWriter w(JsonWriter::Layout::pretty);
  w.begin_object();
  w.key("findings");
  w.begin_array();
  for (const Finding& finding : findings) {
    w.begin_object();
    w.key("criterion");
    w.string_value(std::string(1, criterion_letter(finding.criterion)));
    w.key("severity");
    w.string_value(finding.severity == Severity::error ? "error" : "warning");
    w.key("subject");
    w.string_value(finding.subject);
    w.key("message");
    w.string_value(finding.message);
    w.end_object();
  }
  w.end_array();
  w.key("matrix");
  w.begin_object();
  CriterionMatrix matrix = criterion_matrix(findings);
  for (int i = 0; i < 8; ++i) {
    const auto& cell = matrix.cells[static_cast<std::size_t>(i)];
    w.key(std::string(1, static_cast<char>('a' + i)));
    w.begin_object();
    w.key("pass");
    w.string_value(cell.pass ? "true" : "false");
    w.key("errors");
    w.number_value(cell.errors);
    w.key("warnings");
    w.number_value(cell.warnings);
    w.end_object();
  }
  w.end_object();
  w.end_object();
  return w.take();
}

}  // namespace gqm
