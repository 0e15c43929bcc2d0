#pragma once

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gqm/expr.hpp"
#include "gqm/schema.hpp"

namespace gqm {

struct TypeError {
  std::string message;

  friend bool operator==(const TypeError&, const TypeError&) = default;
};

namespace detail {

inline void check_predicate(const KindSpec& kind, const Predicate& pred,
                            std::vector<TypeError>& errors) {
  const FieldSpec* field = find_field(kind, pred.field);
  if (field == nullptr) {
    errors.push_back({"unknown field '" + pred.field + "' for kind '" + std::string(kind.kind) + "'"});
    return;
  }
  bool literal_is_number = std::holds_alternative<double>(pred.literal);
  if (field->type == FieldType::number && !literal_is_number) {
    errors.push_back({"type mismatch: field '" + pred.field + "' of kind '" +
                      std::string(kind.kind) + "' is numeric, compared with text"});
    return;
  }
  if (field->type == FieldType::text) {
    if (literal_is_number) {
      errors.push_back({"type mismatch: field '" + pred.field + "' of kind '" +
                        std::string(kind.kind) + "' is text, compared with number"});
      return;
    }
    if (pred.op != CompareOp::eq && pred.op != CompareOp::ne) {
      errors.push_back({"type mismatch: text field '" + pred.field + "' supports only == and !="});
    }
  }
}

inline void typecheck_node(const Expr& e, const std::set<std::string, std::less<>>& parameters,
                           std::vector<TypeError>& errors) {
  if (std::holds_alternative<NumberLit>(e.node)) {
    return;
  }
  if (const auto* param = std::get_if<ParamRef>(&e.node)) {
    if (!parameters.contains(param->name)) {
      errors.push_back({"undefined parameter '" + param->name + "'"});
    }
    return;
  }
  if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) {
    typecheck_node(*bin->lhs, parameters, errors);
    typecheck_node(*bin->rhs, parameters, errors);
    return;
  }
  if (const auto* agg = std::get_if<AggregateCall>(&e.node)) {
    const KindSpec* kind = find_kind(agg->kind);
    if (kind == nullptr) {
      errors.push_back({"unknown evidence kind '" + agg->kind + "'"});
      return;
    }
    if (agg->fn == Aggregate::sum || agg->fn == Aggregate::distinct) {
      const FieldSpec* field = find_field(*kind, agg->field);
      if (field == nullptr) {
        errors.push_back({"unknown field '" + agg->field + "' for kind '" + agg->kind + "'"});
      } else if (agg->fn == Aggregate::sum && field->type != FieldType::number) {
        errors.push_back({"sum requires a numeric field; '" + agg->field + "' of kind '" +
                          agg->kind + "' is text"});
      }
    }
    for (const Predicate& pred : agg->predicates) {
      check_predicate(*kind, pred, errors);
    }
    return;
  }
  const auto& ratio = std::get<RatioCall>(e.node);
  typecheck_node(*ratio.numerator, parameters, errors);
  typecheck_node(*ratio.denominator, parameters, errors);
}

}  // namespace detail

// Verifies parameter references against the plan's parameter names and
// evidence kinds/fields/predicates against the evidence schema. The grammar
// only produces numeric-valued expressions, so no result-type check is
// needed. Empty result means the expression is well typed.
inline std::vector<TypeError> typecheck(const Expr& e,
                                        const std::set<std::string, std::less<>>& parameters) {
  std::vector<TypeError> errors;
  detail::typecheck_node(e, parameters, errors);
  return errors;
}

// Evidence kinds referenced anywhere in the expression.
inline void collect_kinds(const Expr& e, std::set<std::string>& out) {
  if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) {
    collect_kinds(*bin->lhs, out);
    collect_kinds(*bin->rhs, out);
  } else if (const auto* agg = std::get_if<AggregateCall>(&e.node)) {
    out.insert(agg->kind);
  } else if (const auto* ratio = std::get_if<RatioCall>(&e.node)) {
    collect_kinds(*ratio->numerator, out);
    collect_kinds(*ratio->denominator, out);
  }
}

// Parameter names referenced anywhere in the expression.
inline void collect_params(const Expr& e, std::set<std::string>& out) {
  if (const auto* param = std::get_if<ParamRef>(&e.node)) {
    out.insert(param->name);
  } else if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) {
    collect_params(*bin->lhs, out);
    collect_params(*bin->rhs, out);
  } else if (const auto* ratio = std::get_if<RatioCall>(&e.node)) {
    collect_params(*ratio->numerator, out);
    collect_params(*ratio->denominator, out);
  }
}

}  // namespace gqm
