#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "gqm/engine.hpp"
#include "generators.hpp"
#include "test_support.hpp"

using namespace gqm;

namespace {

TargetBands bands(Direction d, double excellent, double acceptable) {
  return TargetBands{d, excellent, acceptable};
}

Status classify_value(double v, const TargetBands& t) {
  return classify(EvalOutcome::value(v), t);
}

}  // namespace

TEST_CASE("classification truth table, both directions") {
  // hand-enumerated: 2 directions x {above/at excellent, between, at/below acceptable}
  TargetBands higher = bands(Direction::higher_better, 0.9, 0.7);
  CHECK(classify_value(0.95, higher) == Status::excellent);
  CHECK(classify_value(0.9, higher) == Status::excellent);    // boundary -> better band
  CHECK(classify_value(0.8, higher) == Status::acceptable);
  CHECK(classify_value(0.7, higher) == Status::acceptable);   // boundary -> better band
  CHECK(classify_value(0.6, higher) == Status::unacceptable);

  TargetBands lower = bands(Direction::lower_better, 0.1, 0.25);
  CHECK(classify_value(0.05, lower) == Status::excellent);
  CHECK(classify_value(0.1, lower) == Status::excellent);     // boundary -> better band
  CHECK(classify_value(0.2, lower) == Status::acceptable);
  CHECK(classify_value(0.25, lower) == Status::acceptable);   // boundary -> better band
  CHECK(classify_value(0.3, lower) == Status::unacceptable);
}

TEST_CASE("undefined outcomes and unusable targets classify as unknown") {
  TargetBands higher = bands(Direction::higher_better, 0.9, 0.7);
  CHECK(classify(EvalOutcome::undefined("division 0/0"), higher) == Status::unknown);
  CHECK(classify(EvalOutcome::value(1.0), std::nullopt) == Status::unknown);
  TargetBands directionless{std::nullopt, 0.9, 0.7};
  CHECK(classify(EvalOutcome::value(1.0), directionless) == Status::unknown);
}

TEST_CASE("classification respects direction duality") {
  gqm_test::Rng rng(31415);
  for (int i = 0; i < 500; ++i) {
    double acceptable = rng.decimal(100, 2);
    double excellent = acceptable + rng.decimal(50, 2);
    double v = rng.decimal(200, 2);
    TargetBands higher = bands(Direction::higher_better, excellent, acceptable);
    TargetBands mirrored = bands(Direction::lower_better, -excellent, -acceptable);
    CHECK(classify_value(v, higher) == classify_value(-v, mirrored));
  }
}

TEST_CASE("aggregate_status is the minimum under the status order") {
  CHECK(aggregate_status(std::vector<Status>{Status::excellent, Status::acceptable}) ==
        Status::acceptable);
  CHECK(aggregate_status(std::vector<Status>{Status::acceptable, Status::unknown,
                                             Status::excellent}) == Status::unknown);
  CHECK(aggregate_status(std::vector<Status>{Status::unknown, Status::unacceptable}) ==
        Status::unacceptable);
  CHECK(aggregate_status(std::vector<Status>{Status::excellent}) == Status::excellent);
  CHECK_THROWS_AS(aggregate_status({}), std::invalid_argument);
}

TEST_CASE("aggregation is permutation invariant") {
  gqm_test::Rng rng(2718);
  for (int i = 0; i < 200; ++i) {
    std::vector<Status> statuses;
    int n = 1 + rng.below(6);
    for (int k = 0; k < n; ++k) {
      statuses.push_back(static_cast<Status>(rng.below(4)));
    }
    Status expected = aggregate_status(statuses);
    for (int shuffle = 0; shuffle < 5; ++shuffle) {
      std::rotate(statuses.begin(), statuses.begin() + (shuffle % statuses.size()),
                  statuses.end());
      CHECK(aggregate_status(statuses) == expected);
    }
  }
}

TEST_CASE("hypothesis testing is inclusive and undefined-aware") {
  std::map<std::string, double> params;
  EvalContext ctx{&params, {}};
  Hypothesis le5;
  le5.relation = Relation::le;
  le5.bound = parse_expr("5").expr;

  CHECK(test_hypothesis(EvalOutcome::value(7), le5, ctx) == HypothesisVerdict::rejected);
  CHECK(test_hypothesis(EvalOutcome::value(5), le5, ctx) == HypothesisVerdict::supported);
  CHECK(test_hypothesis(EvalOutcome::value(3), le5, ctx) == HypothesisVerdict::supported);
  CHECK(test_hypothesis(EvalOutcome::undefined("division 0/0"), le5, ctx) ==
        HypothesisVerdict::indeterminate);

  Hypothesis ge5 = le5;
  ge5.relation = Relation::ge;
  CHECK(test_hypothesis(EvalOutcome::value(7), ge5, ctx) == HypothesisVerdict::supported);
  CHECK(test_hypothesis(EvalOutcome::value(3), ge5, ctx) == HypothesisVerdict::rejected);

  Hypothesis undefined_bound;
  undefined_bound.relation = Relation::le;
  undefined_bound.bound = parse_expr("ratio(1, 0)").expr;
  CHECK(test_hypothesis(EvalOutcome::value(1), undefined_bound, ctx) ==
        HypothesisVerdict::indeterminate);
}

TEST_CASE("compute_metric over the demo store") {
  gqm_test::TempDir dir;
  MeasurementPlan plan = gqm_test::load_reference_plan();
  EvidenceStore store = gqm_test::open_demo_store(dir.path() / "store", plan.period_policy);

  // incidents minus threshold: 7 - 5
  MetricResult m22 = compute_metric(plan, "M2.2", store, "2024-01");
  REQUIRE(m22.outcome.is_value());
  CHECK(m22.outcome.value() == 2.0);
  CHECK(m22.status == Status::unacceptable);
  CHECK(m22.verdict == HypothesisVerdict::rejected);

  // 9 of 30 passwords crackable within four hours
  MetricResult m64 = compute_metric(plan, "M6.4", store, "2024-01");
  REQUIRE(m64.outcome.is_value());
  CHECK(format_decimal(m64.outcome.value()) == "0.3");
  CHECK(m64.status == Status::unacceptable);

  // no corrective actions in February: undefined, unknown
  MetricResult m32 = compute_metric(plan, "M3.2", store, "2024-02");
  REQUIRE_FALSE(m32.outcome.is_value());
  CHECK(m32.outcome.reason() == "division 0/0");
  CHECK(m32.status == Status::unknown);
  CHECK(m32.verdict == HypothesisVerdict::none);

  // update success rate sits exactly on the acceptable cut and its floor
  MetricResult m41 = compute_metric(plan, "M4.1", store, "2024-01");
  REQUIRE(m41.outcome.is_value());
  CHECK(m41.outcome.value() == 0.8);
  CHECK(m41.status == Status::acceptable);
  CHECK(m41.verdict == HypothesisVerdict::supported);

  // undefined outcome with a hypothesis is indeterminate
  MeasurementPlan with_hypothesis = plan;
  for (Metric& metric : with_hypothesis.metrics) {
    if (metric.metric_id == "M3.2") {
      Hypothesis h;
      h.relation = Relation::ge;
      h.bound_source = "0.5";
      h.bound = parse_expr("0.5").expr;
      metric.hypothesis = h;
    }
  }
  MetricResult indeterminate = compute_metric(with_hypothesis, "M3.2", store, "2024-02");
  CHECK(indeterminate.status == Status::unknown);
  CHECK(indeterminate.verdict == HypothesisVerdict::indeterminate);
}

TEST_CASE("run_measurement assembles the full hierarchy deterministically") {
  gqm_test::TempDir dir;
  MeasurementPlan plan = gqm_test::load_reference_plan();
  EvidenceStore store = gqm_test::open_demo_store(dir.path() / "store", plan.period_policy);

  MeasurementRun run = run_measurement(plan, store, "2024-01");
  CHECK(run.metric_results.size() == 18);
  CHECK(run.question_statuses.size() == 8);
  CHECK(run.goal_statuses.size() == 1);
  CHECK(run.evidence_digest == store.snapshot_digest("2024-01"));
  CHECK(run.run_timestamp == "2024-02-01T00:00:00Z");
  // results follow plan declaration order
  for (std::size_t i = 0; i < plan.metrics.size(); ++i) {
    CHECK(run.metric_results[i].metric_id == plan.metrics[i].metric_id);
  }

  CHECK(serialize_run(run) == serialize_run(run_measurement(plan, store, "2024-01")));

  // demo narrative: unacceptable -> unknown -> acceptable
  CHECK(run.goal_statuses[0].second == Status::unacceptable);
  CHECK(run_measurement(plan, store, "2024-02").goal_statuses[0].second == Status::unknown);
  CHECK(run_measurement(plan, store, "2024-03").goal_statuses[0].second == Status::acceptable);
}

TEST_CASE("unknown periods measure with zero counts") {
  gqm_test::TempDir dir;
  MeasurementPlan plan = gqm_test::load_reference_plan();
  EvidenceStore store = gqm_test::open_demo_store(dir.path() / "store", plan.period_policy);
  MeasurementRun run = run_measurement(plan, store, "1990-01");
  CHECK(run.metric_results.size() == 18);
  const MetricResult* m21 = run.find_result("M2.1");
  REQUIRE(m21 != nullptr);
  REQUIRE(m21->outcome.is_value());
  CHECK(m21->outcome.value() == 0.0);
  const MetricResult* m32 = run.find_result("M3.2");
  REQUIRE(m32 != nullptr);
  CHECK_FALSE(m32->outcome.is_value());
  CHECK(m32->status == Status::unknown);
}

TEST_CASE("run documents round-trip and statuses recompute from them") {
  gqm_test::TempDir dir;
  MeasurementPlan plan = gqm_test::load_reference_plan();
  EvidenceStore store = gqm_test::open_demo_store(dir.path() / "store", plan.period_policy);
  MeasurementRun run = run_measurement(plan, store, "2024-02");
  RunParse reparsed = parse_run(serialize_run(run));
  REQUIRE(reparsed.ok());
  CHECK(serialize_run(*reparsed.run) == serialize_run(run));

  // question and goal statuses equal the documented aggregation of children
  for (const Goal& goal : plan.goals) {
    std::vector<Status> question_statuses;
    for (const Question& question : goal.questions) {
      std::vector<Status> metric_statuses;
      for (const std::string& ref : question.metric_refs) {
        metric_statuses.push_back(reparsed.run->find_result(ref)->status);
      }
      Status expected = aggregate_status(metric_statuses);
      question_statuses.push_back(expected);
      for (const auto& [qid, status] : reparsed.run->question_statuses) {
        if (qid == question.question_id) {
          CHECK(status == expected);
        }
      }
    }
    CHECK(reparsed.run->goal_statuses[0].second == aggregate_status(question_statuses));
  }
}

TEST_CASE("improving one metric status never lowers a rollup") {
  gqm_test::Rng rng(8080);
  for (int i = 0; i < 300; ++i) {
    std::vector<Status> statuses;
    int n = 1 + rng.below(6);
    for (int k = 0; k < n; ++k) {
      statuses.push_back(static_cast<Status>(rng.below(4)));
    }
    Status before = aggregate_status(statuses);
    int pick = rng.below(n);
    if (statuses[static_cast<std::size_t>(pick)] == Status::excellent) {
      continue;
    }
    statuses[static_cast<std::size_t>(pick)] =
        static_cast<Status>(static_cast<int>(statuses[static_cast<std::size_t>(pick)]) + 1);
    CHECK(static_cast<int>(aggregate_status(statuses)) >= static_cast<int>(before));
  }
}

TEST_CASE("trend reads endpoints under the metric direction") {
  gqm_test::TempDir dir;
  MeasurementPlan plan = gqm_test::load_reference_plan();
  EvidenceStore store = gqm_test::open_demo_store(dir.path() / "store", plan.period_policy);
  std::vector<MeasurementRun> runs;
  for (const char* period : {"2024-01", "2024-02", "2024-03"}) {
    runs.push_back(run_measurement(plan, store, period));
  }

  TrendSeries m41 = trend(runs, plan, "M4.1");  // 0.8 -> 0.916667 -> 1, higher_better
  CHECK(m41.assessment == TrendAssessment::improving);
  CHECK(m41.points.size() == 3);

  TrendSeries m11 = trend(runs, plan, "M1.1");  // constant parameters
  CHECK(m11.assessment == TrendAssessment::flat);

  TrendSeries m42 = trend(runs, plan, "M4.2");  // 2 -> 2 -> 1, higher_better
  CHECK(m42.assessment == TrendAssessment::degrading);

  TrendSeries m22 = trend(runs, plan, "M2.2");  // 2 -> 0 -> -2, lower_better
  CHECK(m22.assessment == TrendAssessment::improving);

  // undefined middles don't block endpoint assessment
  TrendSeries m32 = trend(runs, plan, "M3.2");  // 0.75 -> undefined -> 1
  CHECK(m32.assessment == TrendAssessment::improving);

  std::vector<MeasurementRun> single = {runs[0]};
  CHECK(trend(single, plan, "M4.1").assessment == TrendAssessment::insufficient_data);
}
