#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include "gqm/lint.hpp"
#include "test_support.hpp"

using namespace gqm;

namespace {

int error_count(const std::vector<Finding>& findings) {
  int n = 0;
  for (const Finding& finding : findings) {
    n += finding.severity == Severity::error ? 1 : 0;
  }
  return n;
}

// One seeded defect per criterion, applied to a copy of the reference plan.
struct SeededDefect {
  Criterion criterion;
  std::function<void(MeasurementPlan&)> apply;
};

const std::vector<SeededDefect>& seeded_corpus() {
  static const std::vector<SeededDefect> corpus = {
      {Criterion::a, [](MeasurementPlan& p) { p.goals[0].control_ref.clear(); }},
      {Criterion::b, [](MeasurementPlan& p) { p.metrics[0].unit.clear(); }},
      {Criterion::c, [](MeasurementPlan& p) { p.metrics[2].responsible_role.clear(); }},
      {Criterion::d,
       [](MeasurementPlan& p) {
         ExprParse parsed = parse_expr("param(\"ghost_parameter\")");
         p.metrics[0].formula = parsed.expr;
         p.metrics[0].formula_source = "param(\"ghost_parameter\")";
       }},
      {Criterion::e, [](MeasurementPlan& p) { p.metrics[4].review_note.clear(); }},
      {Criterion::f, [](MeasurementPlan& p) { p.metrics[5].audience.clear(); }},
      {Criterion::g, [](MeasurementPlan& p) { p.metrics[6].targets->direction.reset(); }},
      {Criterion::h, [](MeasurementPlan& p) { p.goals[0].business_goal.clear(); }},
  };
  return corpus;
}

}  // namespace

TEST_CASE("reference plan lints clean") {
  MeasurementPlan plan = gqm_test::load_reference_plan();
  std::vector<Finding> findings = lint_plan(plan);
  CHECK(error_count(findings) == 0);
  CHECK(findings.empty());
  CriterionMatrix matrix = criterion_matrix(findings);
  for (const auto& cell : matrix.cells) {
    CHECK(cell.pass);
  }
}

TEST_CASE("a metric without a unit is exactly one criterion-b error") {
  MeasurementPlan plan = gqm_test::load_reference_plan();
  plan.metrics[3].unit.clear();
  std::vector<Finding> findings = lint_plan(plan);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].criterion == Criterion::b);
  CHECK(findings[0].severity == Severity::error);
  CHECK(findings[0].subject == plan.metrics[3].metric_id);
}

TEST_CASE("missing target bands fail criterion a") {
  MeasurementPlan plan = gqm_test::load_reference_plan();
  plan.metrics[0].targets.reset();
  std::vector<Finding> findings = lint_plan(plan);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].criterion == Criterion::a);
  CHECK(findings[0].severity == Severity::error);
}

TEST_CASE("seeded corpus: each defect fires only its own criterion") {
  for (const SeededDefect& defect : seeded_corpus()) {
    MeasurementPlan plan = gqm_test::load_reference_plan();
    defect.apply(plan);
    std::vector<Finding> findings = lint_plan(plan);
    INFO("criterion " << criterion_letter(defect.criterion));
    bool tagged = false;
    for (const Finding& finding : findings) {
      if (finding.criterion == defect.criterion) {
        tagged = true;
      } else {
        // no error findings with any other tag
        CHECK(finding.severity != Severity::error);
      }
    }
    CHECK(tagged);
  }
}

TEST_CASE("warning criteria never fail the matrix") {
  MeasurementPlan plan = gqm_test::load_reference_plan();
  plan.metrics[0].review_note.clear();          // (e) warning
  plan.metrics[1].targets->direction.reset();   // (g) warning
  plan.goals[0].business_goal.clear();          // (h) warning
  std::vector<Finding> findings = lint_plan(plan);
  CHECK(findings.size() == 3);
  CHECK(error_count(findings) == 0);
  CriterionMatrix matrix = criterion_matrix(findings);
  for (const auto& cell : matrix.cells) {
    CHECK(cell.pass);
  }
  CHECK(matrix.cell(Criterion::e).warnings == 1);
  CHECK(matrix.cell(Criterion::g).warnings == 1);
  CHECK(matrix.cell(Criterion::h).warnings == 1);
}

TEST_CASE("criterion matrix folds findings deterministically") {
  CriterionMatrix empty = criterion_matrix({});
  for (const auto& cell : empty.cells) {
    CHECK(cell.pass);
    CHECK(cell.errors == 0);
    CHECK(cell.warnings == 0);
  }

  std::vector<Finding> one = {{Criterion::f, Severity::error, "M1.1", "metric names no audience"}};
  CriterionMatrix matrix = criterion_matrix(one);
  for (int i = 0; i < 8; ++i) {
    auto criterion = static_cast<Criterion>(i);
    CHECK(matrix.cell(criterion).pass == (criterion != Criterion::f));
  }
  CHECK(matrix.cell(Criterion::f).errors == 1);
}

TEST_CASE("findings are ordered by criterion then subject") {
  MeasurementPlan plan = gqm_test::load_reference_plan();
  plan.metrics[10].audience.clear();  // (f)
  plan.metrics[2].unit.clear();       // (b)
  plan.metrics[0].unit.clear();       // (b)
  std::vector<Finding> findings = lint_plan(plan);
  REQUIRE(findings.size() == 3);
  CHECK(findings[0].criterion == Criterion::b);
  CHECK(findings[0].subject == plan.metrics[0].metric_id);
  CHECK(findings[1].criterion == Criterion::b);
  CHECK(findings[1].subject == plan.metrics[2].metric_id);
  CHECK(findings[2].criterion == Criterion::f);
}

TEST_CASE("lint is stable across canonicalization") {
  MeasurementPlan plan = gqm_test::load_reference_plan();
  plan.metrics[3].unit.clear();
  plan.metrics[4].review_note.clear();
  PlanParse reparsed = parse_plan(canonicalize(plan));
  REQUIRE(reparsed.ok());
  CHECK(lint_plan(*reparsed.plan) == lint_plan(plan));
}

TEST_CASE("findings render as text lines and as a machine document") {
  std::vector<Finding> findings = {
      {Criterion::b, Severity::error, "M2.1", "metric has no unit of measure"},
      {Criterion::e, Severity::warning, "M3.2", "metric has no review note describing the corrective action"},
  };
  std::string lines = render_findings(findings);
  CHECK(lines.find("ERROR criterion=b subject=M2.1 metric has no unit of measure\n") !=
        std::string::npos);
  CHECK(lines.find("WARNING criterion=e subject=M3.2") != std::string::npos);

  std::string doc = serialize_findings(findings);
  CHECK(doc.find("\"criterion\": \"b\"") != std::string::npos);
  CHECK(doc.find("\"severity\": \"warning\"") != std::string::npos);
}
