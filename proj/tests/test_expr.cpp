#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "gqm/expr.hpp"
#include "gqm/typecheck.hpp"
#include "generators.hpp"
#include "test_support.hpp"

using namespace gqm;

namespace {

ExprPtr must_parse(std::string_view src) {
  ExprParse parsed = parse_expr(src);
  INFO(src);
  if (!parsed.ok()) {
    INFO(parsed.error->message);
  }
  REQUIRE(parsed.ok());
  return parsed.expr;
}

}  // namespace

TEST_CASE("risk formula parses to a left-nested product of param refs") {
  ExprPtr e = must_parse("param(\"asset_value\") * param(\"threat\") * param(\"vuln\")");
  const auto* outer = std::get_if<BinaryExpr>(&e->node);
  REQUIRE(outer != nullptr);
  CHECK(outer->op == BinaryOp::mul);
  const auto* inner = std::get_if<BinaryExpr>(&outer->lhs->node);
  REQUIRE(inner != nullptr);
  CHECK(inner->op == BinaryOp::mul);
  CHECK(std::get<ParamRef>(inner->lhs->node).name == "asset_value");
  CHECK(std::get<ParamRef>(inner->rhs->node).name == "threat");
  CHECK(std::get<ParamRef>(outer->rhs->node).name == "vuln");
}

TEST_CASE("multiplication binds tighter than addition") {
  ExprPtr e = must_parse("1 + 2 * 3");
  const auto* add = std::get_if<BinaryExpr>(&e->node);
  REQUIRE(add != nullptr);
  CHECK(add->op == BinaryOp::add);
  CHECK(std::get<NumberLit>(add->lhs->node).value == 1.0);
  const auto* mul = std::get_if<BinaryExpr>(&add->rhs->node);
  REQUIRE(mul != nullptr);
  CHECK(mul->op == BinaryOp::mul);
}

TEST_CASE("nested aggregate calls parse structurally") {
  ExprPtr e = must_parse(
      "ratio(count(password_audit, crack_time_hours <= 4), count(password_audit))");
  const auto* ratio = std::get_if<RatioCall>(&e->node);
  REQUIRE(ratio != nullptr);
  const auto* numerator = std::get_if<AggregateCall>(&ratio->numerator->node);
  REQUIRE(numerator != nullptr);
  CHECK(numerator->fn == Aggregate::count);
  CHECK(numerator->kind == "password_audit");
  REQUIRE(numerator->predicates.size() == 1);
  CHECK(numerator->predicates[0].field == "crack_time_hours");
  CHECK(numerator->predicates[0].op == CompareOp::le);
  CHECK(std::get<double>(numerator->predicates[0].literal) == 4.0);
  const auto* denominator = std::get_if<AggregateCall>(&ratio->denominator->node);
  REQUIRE(denominator != nullptr);
  CHECK(denominator->predicates.empty());
}

TEST_CASE("parse errors carry a position and a reason") {
  auto check_error = [](std::string_view src, std::string_view needle) {
    ExprParse parsed = parse_expr(src);
    REQUIRE_FALSE(parsed.ok());
    INFO(src << " -> " << parsed.error->message);
    CHECK(parsed.error->message.find(needle) != std::string::npos);
    CHECK(parsed.error->column > 0);
  };
  check_error("1 +", "expected");
  check_error("median(incident)", "unknown function 'median'");
  check_error("distinct(incident)", "expected");
  check_error("distinct(training, attendee, course == \"x\")", "exactly two arguments");
  check_error("count()", "expected evidence kind");
  check_error("param(incident)", "quoted parameter name");
  check_error("1.2345678", "6 fractional digits");
  check_error("count(incident) @ 2", "unexpected character");
  check_error("count(incident, severity ~ 1)", "unexpected character");
  check_error("(1 + 2", "expected ')'");
  check_error("count(incident, severity 1)", "comparison");
}

TEST_CASE("printer uses minimal parentheses") {
  CHECK(print_expr(*must_parse("1 + 2 * 3")) == "1 + 2 * 3");
  CHECK(print_expr(*must_parse("(1 + 2) * 3")) == "(1 + 2) * 3");
  CHECK(print_expr(*must_parse("1 - (2 - 3)")) == "1 - (2 - 3)");
  CHECK(print_expr(*must_parse("1 - 2 - 3")) == "1 - 2 - 3");
  CHECK(print_expr(*must_parse("(1 + 2) / (3 + 4)")) == "(1 + 2) / (3 + 4)");
  CHECK(print_expr(*must_parse("count(incident, severity == \"high\", source != \"ids\")")) ==
        "count(incident, severity == \"high\", source != \"ids\")");
}

TEST_CASE("reference plan formulas round-trip through print and parse") {
  MeasurementPlan plan = gqm_test::load_reference_plan();
  REQUIRE(plan.metrics.size() == 18);
  for (const Metric& metric : plan.metrics) {
    INFO(metric.metric_id);
    REQUIRE(metric.formula != nullptr);
    std::string printed = print_expr(*metric.formula);
    ExprParse reparsed = parse_expr(printed);
    REQUIRE(reparsed.ok());
    CHECK(*reparsed.expr == *metric.formula);
  }
}

TEST_CASE("random trees round-trip through print and parse") {
  gqm_test::Rng rng(20240117);
  for (int i = 0; i < 500; ++i) {
    ExprPtr tree = gqm_test::random_tree(rng, 4);
    std::string printed = print_expr(*tree);
    ExprParse reparsed = parse_expr(printed);
    INFO(printed);
    REQUIRE(reparsed.ok());
    CHECK(*reparsed.expr == *tree);
  }
}

TEST_CASE("typecheck accepts the reference plan formulas") {
  MeasurementPlan plan = gqm_test::load_reference_plan();
  for (const Metric& metric : plan.metrics) {
    INFO(metric.metric_id);
    CHECK(typecheck(*metric.formula, plan).empty());
  }
}

TEST_CASE("typecheck reports undefined parameters and schema mismatches") {
  std::set<std::string, std::less<>> params = {"threshold"};

  auto errors = typecheck(*must_parse("param(\"missing\")"), params);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].message.find("missing") != std::string::npos);

  // text field compared numerically
  errors = typecheck(*must_parse("count(corrective_action, status <= 4)"), params);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].message.find("type mismatch") != std::string::npos);

  // ordering on a text field
  errors = typecheck(*must_parse("count(incident, severity < \"high\")"), params);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].message.find("only == and !=") != std::string::npos);

  errors = typecheck(*must_parse("count(firewall_rule)"), params);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].message.find("unknown evidence kind") != std::string::npos);

  errors = typecheck(*must_parse("sum(incident, severity)"), params);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].message.find("numeric field") != std::string::npos);

  errors = typecheck(*must_parse("distinct(incident, nonexistent)"), params);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].message.find("unknown field") != std::string::npos);

  // numeric field compared with text
  errors = typecheck(*must_parse("count(password_audit, crack_time_hours == \"slow\")"), params);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].message.find("type mismatch") != std::string::npos);
}
