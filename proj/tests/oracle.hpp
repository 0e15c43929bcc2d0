#pragma once

// Naive reference evaluator, written directly from the documented formula
// semantics and kept independent of gqm::evaluate. It re-implements the
// tree walk, predicate matching and aggregation with plain recursion and
// linear scans over its own record list.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gqm/evidence.hpp"
#include "gqm/expr.hpp"

namespace gqm_test {

struct OracleResult {
  bool defined = false;
  double value = 0.0;

  static OracleResult of(double v) {
    if (!std::isfinite(v)) {
      return {};
    }
    return {true, v};
  }
};

class Oracle {
 public:
  Oracle(std::vector<gqm::EvidenceRecord> records, std::map<std::string, double> params)
      : records_(std::move(records)), params_(std::move(params)) {
    // canonical aggregation order is record_id order
    std::sort(records_.begin(), records_.end(),
              [](const gqm::EvidenceRecord& a, const gqm::EvidenceRecord& b) {
                return a.record_id < b.record_id;
              });
  }

  OracleResult eval(const gqm::Expr& e) const {
    if (const auto* num = std::get_if<gqm::NumberLit>(&e.node)) {
      return OracleResult::of(num->value);
    }
    if (const auto* param = std::get_if<gqm::ParamRef>(&e.node)) {
      auto it = params_.find(param->name);
      if (it == params_.end()) {
        return {};
      }
      return OracleResult::of(it->second);
    }
    if (const auto* bin = std::get_if<gqm::BinaryExpr>(&e.node)) {
      OracleResult lhs = eval(*bin->lhs);
      if (!lhs.defined) {
        return {};
      }
      OracleResult rhs = eval(*bin->rhs);
      if (!rhs.defined) {
        return {};
      }
      switch (bin->op) {
        case gqm::BinaryOp::add: return OracleResult::of(lhs.value + rhs.value);
        case gqm::BinaryOp::sub: return OracleResult::of(lhs.value - rhs.value);
        case gqm::BinaryOp::mul: return OracleResult::of(lhs.value * rhs.value);
        case gqm::BinaryOp::divide:
          return rhs.value == 0.0 ? OracleResult{} : OracleResult::of(lhs.value / rhs.value);
      }
      return {};
    }
    if (const auto* agg = std::get_if<gqm::AggregateCall>(&e.node)) {
      return aggregate(*agg);
    }
    const auto& ratio = std::get<gqm::RatioCall>(e.node);
    OracleResult numerator = eval(*ratio.numerator);
    if (!numerator.defined) {
      return {};
    }
    OracleResult denominator = eval(*ratio.denominator);
    if (!denominator.defined || denominator.value == 0.0) {
      return {};
    }
    return OracleResult::of(numerator.value / denominator.value);
  }

 private:
  static bool pred_holds(const gqm::EvidenceRecord& record, const gqm::Predicate& pred) {
    auto it = record.attributes.find(pred.field);
    if (it == record.attributes.end()) {
      return false;
    }
    if (const double* want = std::get_if<double>(&pred.literal)) {
      const double* have = std::get_if<double>(&it->second);
      if (have == nullptr) {
        return false;
      }
      switch (pred.op) {
        case gqm::CompareOp::eq: return *have == *want;
        case gqm::CompareOp::ne: return *have != *want;
        case gqm::CompareOp::lt: return *have < *want;
        case gqm::CompareOp::le: return *have <= *want;
        case gqm::CompareOp::gt: return *have > *want;
        case gqm::CompareOp::ge: return *have >= *want;
      }
      return false;
    }
    const std::string* have = std::get_if<std::string>(&it->second);
    if (have == nullptr) {
      return false;
    }
    const std::string& want = std::get<std::string>(pred.literal);
    if (pred.op == gqm::CompareOp::eq) {
      return *have == want;
    }
    if (pred.op == gqm::CompareOp::ne) {
      return *have != want;
    }
    return false;
  }

  bool selected(const gqm::EvidenceRecord& record, const gqm::AggregateCall& call) const {
    if (record.kind != call.kind) {
      return false;
    }
    for (const gqm::Predicate& pred : call.predicates) {
      if (!pred_holds(record, pred)) {
        return false;
      }
    }
    return true;
  }

  OracleResult aggregate(const gqm::AggregateCall& call) const {
    if (call.fn == gqm::Aggregate::count) {
      double n = 0;
      for (const gqm::EvidenceRecord& record : records_) {
        if (selected(record, call)) {
          n += 1;
        }
      }
      return OracleResult::of(n);
    }
    if (call.fn == gqm::Aggregate::sum) {
      double total = 0.0;
      for (const gqm::EvidenceRecord& record : records_) {
        if (!selected(record, call)) {
          continue;
        }
        auto it = record.attributes.find(call.field);
        if (it != record.attributes.end()) {
          if (const double* number = std::get_if<double>(&it->second)) {
            total += *number;
          }
        }
      }
      return OracleResult::of(total);
    }
    std::set<std::string> seen;
    for (const gqm::EvidenceRecord& record : records_) {
      if (record.kind != call.kind) {
        continue;
      }
      auto it = record.attributes.find(call.field);
      if (it == record.attributes.end()) {
        continue;
      }
      if (const double* number = std::get_if<double>(&it->second)) {
        seen.insert(gqm::format_decimal(*number));
      } else {
        seen.insert(std::get<std::string>(it->second));
      }
    }
    return OracleResult::of(static_cast<double>(seen.size()));
  }

  std::vector<gqm::EvidenceRecord> records_;
  std::map<std::string, double> params_;
};

}  // namespace gqm_test
