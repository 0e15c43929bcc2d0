#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <variant>

#include "gqm/decimal.hpp"
#include "gqm/evidence.hpp"
#include "gqm/expr.hpp"

namespace gqm {

// Either a finite value or Undefined with a reason. Division by zero folds
// into Undefined so that missing evidence never masquerades as a result.
struct EvalOutcome {
  static EvalOutcome value(double v) {
    EvalOutcome o;
    if (!std::isfinite(v)) {
      o.reason_ = "overflow";
      return o;
    }
    o.value_ = v;
    return o;
  }

  static EvalOutcome undefined(std::string reason) {
    EvalOutcome o;
    o.reason_ = std::move(reason);
    return o;
  }

  bool is_value() const { return !std::isnan(value_); }
  double value() const { return value_; }
  const std::string& reason() const { return reason_; }

  friend bool operator==(const EvalOutcome& a, const EvalOutcome& b) {
    if (a.is_value() != b.is_value()) {
      return false;
    }
    return a.is_value() ? a.value_ == b.value_ : a.reason_ == b.reason_;
  }

 private:
  double value_ = std::numeric_limits<double>::quiet_NaN();
  std::string reason_;
};

// Evaluation inputs: the plan's parameters and the period's evidence,
// sorted by record_id so that aggregation order is canonical.
struct EvalContext {
  const std::map<std::string, double>* parameters = nullptr;
  std::span<const EvidenceRecord> records;
};

namespace detail {

inline EvalOutcome divide_outcome(double numerator, double denominator) {
  if (denominator == 0.0) {
    return EvalOutcome::undefined("division " + format_decimal(numerator) + "/0");
  }
  return EvalOutcome::value(numerator / denominator);
}

inline EvalOutcome eval_aggregate(const AggregateCall& call, const EvalContext& ctx) {
  switch (call.fn) {
    case Aggregate::count: {
      std::size_t n = 0;
      for (const EvidenceRecord& record : ctx.records) {
        if (record.kind == call.kind && matches_all(record, call.predicates)) {
          ++n;
        }
      }
      return EvalOutcome::value(static_cast<double>(n));
    }
    case Aggregate::sum: {
      double total = 0.0;
      for (const EvidenceRecord& record : ctx.records) {
        if (record.kind != call.kind || !matches_all(record, call.predicates)) {
          continue;
        }
        auto it = record.attributes.find(call.field);
        if (it != record.attributes.end()) {
          if (const double* number = std::get_if<double>(&it->second)) {
            total += *number;
          }
        }
      }
      return EvalOutcome::value(total);
    }
    case Aggregate::distinct: {
      std::set<std::string> seen;
      for (const EvidenceRecord& record : ctx.records) {
        if (record.kind != call.kind) {
          continue;
        }
        auto it = record.attributes.find(call.field);
        if (it == record.attributes.end()) {
          continue;
        }
        if (const double* number = std::get_if<double>(&it->second)) {
          seen.insert(format_decimal(*number));
        } else {
          seen.insert(std::get<std::string>(it->second));
        }
      }
      return EvalOutcome::value(static_cast<double>(seen.size()));
    }
  }
  return EvalOutcome::undefined("unreachable");
}

}  // namespace detail

// Deterministic tree evaluation. Undefined propagates; a zero denominator
// (in ratio() or /) is Undefined, never a float special value.
inline EvalOutcome evaluate(const Expr& e, const EvalContext& ctx) {
  if (const auto* num = std::get_if<NumberLit>(&e.node)) {
    return EvalOutcome::value(num->value);
  }
  if (const auto* param = std::get_if<ParamRef>(&e.node)) {
    auto it = ctx.parameters != nullptr ? ctx.parameters->find(param->name)
                                        : std::map<std::string, double>::const_iterator{};
    if (ctx.parameters == nullptr || it == ctx.parameters->end()) {
      return EvalOutcome::undefined("undefined parameter " + param->name);
    }
    return EvalOutcome::value(it->second);
  }
  if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) {
    EvalOutcome lhs = evaluate(*bin->lhs, ctx);
    if (!lhs.is_value()) {
      return lhs;
    }
    EvalOutcome rhs = evaluate(*bin->rhs, ctx);
    if (!rhs.is_value()) {
      return rhs;
    }
    switch (bin->op) {
      case BinaryOp::add: return EvalOutcome::value(lhs.value() + rhs.value());
      case BinaryOp::sub: return EvalOutcome::value(lhs.value() - rhs.value());
      case BinaryOp::mul: return EvalOutcome::value(lhs.value() * rhs.value());
      case BinaryOp::divide: return detail::divide_outcome(lhs.value(), rhs.value());
    }
    return EvalOutcome::undefined("unreachable");
  }
  if (const auto* agg = std::get_if<AggregateCall>(&e.node)) {
    return detail::eval_aggregate(*agg, ctx);
  }
  const auto& ratio = std::get<RatioCall>(e.node);
  EvalOutcome numerator = evaluate(*ratio.numerator, ctx);
  if (!numerator.is_value()) {
    return numerator;
  }
  EvalOutcome denominator = evaluate(*ratio.denominator, ctx);
  if (!denominator.is_value()) {
    return denominator;
  }
  return detail::divide_outcome(numerator.value(), denominator.value());
}

}  // namespace gqm
