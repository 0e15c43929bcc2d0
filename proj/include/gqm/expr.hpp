#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gqm/decimal.hpp"

namespace gqm {

// Metric formulas are arithmetic over evidence aggregates and plan
// parameters:
//
//   expr   := term ((+|-) term)*
//   term   := factor ((*|/) factor)*
//   factor := number | call | '(' expr ')'
//   call   := param("name") | count(kind, pred...) | sum(kind, field, pred...)
//           | distinct(kind, field) | ratio(expr, expr)
//   pred   := field op literal, op in {==, !=, <, <=, >, >=}
//
// Numbers carry at most six fractional digits. Predicates conjoin.

enum class BinaryOp { add, sub, mul, divide };

inline std::string_view binary_op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::divide: return "/";
  }
  return "?";
}

enum class CompareOp { eq, ne, lt, le, gt, ge };

inline std::string_view compare_op_symbol(CompareOp op) {
  switch (op) {
    case CompareOp::eq: return "==";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "?";
}

struct Predicate {
  std::string field;
  CompareOp op = CompareOp::eq;
  std::variant<double, std::string> literal;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct NumberLit {
  double value = 0.0;
};

struct ParamRef {
  std::string name;
};

struct BinaryExpr {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

enum class Aggregate { count, sum, distinct };

inline std::string_view aggregate_name(Aggregate fn) {
  switch (fn) {
    case Aggregate::count: return "count";
    case Aggregate::sum: return "sum";
    case Aggregate::distinct: return "distinct";
  }
  return "?";
}

struct AggregateCall {
  Aggregate fn = Aggregate::count;
  std::string kind;
  std::string field;  // sum and distinct only
  std::vector<Predicate> predicates;
};

struct RatioCall {
  ExprPtr numerator;
  ExprPtr denominator;
};

struct Expr {
  std::variant<NumberLit, ParamRef, BinaryExpr, AggregateCall, RatioCall> node;
};

bool operator==(const Expr& a, const Expr& b);

inline bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) {
    return true;
  }
  if (!a || !b) {
    return false;
  }
  return *a == *b;
}

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) {
    return false;
  }
  if (const auto* n = std::get_if<NumberLit>(&a.node)) {
    return n->value == std::get<NumberLit>(b.node).value;
  }
  if (const auto* p = std::get_if<ParamRef>(&a.node)) {
    return p->name == std::get<ParamRef>(b.node).name;
  }
  if (const auto* x = std::get_if<BinaryExpr>(&a.node)) {
    const auto& y = std::get<BinaryExpr>(b.node);
    return x->op == y.op && equal(x->lhs, y.lhs) && equal(x->rhs, y.rhs);
  }
  if (const auto* x = std::get_if<AggregateCall>(&a.node)) {
    const auto& y = std::get<AggregateCall>(b.node);
    return x->fn == y.fn && x->kind == y.kind && x->field == y.field &&
           x->predicates == y.predicates;
  }
  const auto& x = std::get<RatioCall>(a.node);
  const auto& y = std::get<RatioCall>(b.node);
  return equal(x.numerator, y.numerator) && equal(x.denominator, y.denominator);
}

template <typename Node>
ExprPtr make_expr(Node node) {
  return std::make_shared<const Expr>(Expr{std::move(node)});
}

// --- parsing ---------------------------------------------------------------

struct ExprError {
  std::size_t column = 0;  // 1-based byte column in the source text
  std::string message;
};

struct ExprParse {
  ExprPtr expr;
  std::optional<ExprError> error;

  bool ok() const { return expr != nullptr; }
};

namespace detail {

enum class TokKind { number, ident, string, symbol, end };

struct Token {
  TokKind kind = TokKind::end;
  std::string text;     // ident/string payload, or the symbol itself
  double number = 0.0;  // number payload
  std::size_t column = 0;
};

class ExprLexer {
 public:
  explicit ExprLexer(std::string_view src) : src_(src) {}

  // Returns false and fills `error` on a malformed token.
  bool next(Token& tok, ExprError& error) {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    tok.column = pos_ + 1;
    if (pos_ >= src_.size()) {
      tok.kind = TokKind::end;
      tok.text.clear();
      return true;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      return lex_number(tok, error);
    }
    if (c == '_' || std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (src_[pos_] == '_' || std::isalnum(static_cast<unsigned char>(src_[pos_])))) {
        ++pos_;
      }
      tok.kind = TokKind::ident;
      tok.text = std::string(src_.substr(start, pos_ - start));
      return true;
    }
    if (c == '"') {
      return lex_string(tok, error);
    }
    // multi-char comparison operators first
    for (std::string_view sym : {"==", "!=", "<=", ">="}) {
      if (src_.substr(pos_).starts_with(sym)) {
        tok.kind = TokKind::symbol;
        tok.text = std::string(sym);
        pos_ += 2;
        return true;
      }
    }
    if (std::string_view("+-*/(),<>").find(c) != std::string_view::npos) {
      tok.kind = TokKind::symbol;
      tok.text = std::string(1, c);
      ++pos_;
      return true;
    }
    error = {tok.column, std::string("unexpected character '") + c + "'"};
    return false;
  }

 private:
  bool lex_number(Token& tok, ExprError& error) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      std::size_t frac_start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
      }
      if (pos_ == frac_start) {
        error = {pos_ + 1, "digit expected after decimal point"};
        return false;
      }
      if (pos_ - frac_start > 6) {
        error = {start + 1, "number has more than 6 fractional digits"};
        return false;
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    double value = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || p != text.data() + text.size()) {
      error = {start + 1, "malformed number"};
      return false;
    }
    tok.kind = TokKind::number;
    tok.number = value;
    tok.text = std::move(text);
    return true;
  }

  bool lex_string(Token& tok, ExprError& error) {
    std::size_t start = pos_;
    ++pos_;  // opening quote
    std::string value;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      char c = src_[pos_];
      if (c == '\\') {
        if (pos_ + 1 >= src_.size() || (src_[pos_ + 1] != '"' && src_[pos_ + 1] != '\\')) {
          error = {pos_ + 1, "unsupported escape in string"};
          return false;
        }
        value += src_[pos_ + 1];
        pos_ += 2;
        continue;
      }
      value += c;
      ++pos_;
    }
    if (pos_ >= src_.size()) {
      error = {start + 1, "unterminated string"};
      return false;
    }
    ++pos_;  // closing quote
    tok.kind = TokKind::string;
    tok.text = std::move(value);
    return true;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : lexer_(src) {}

  ExprParse run() {
    if (!advance()) {
      return fail();
    }
    ExprPtr e = parse_expression();
    if (!e) {
      return fail();
    }
    if (tok_.kind != TokKind::end) {
      error_ = {tok_.column, "unexpected token '" + describe(tok_) + "'"};
      return fail();
    }
    return {std::move(e), std::nullopt};
  }

 private:
  ExprParse fail() { return {nullptr, error_}; }

  bool advance() {
    ExprError err;
    if (!lexer_.next(tok_, err)) {
      error_ = err;
      return false;
    }
    return true;
  }

  bool is_symbol(std::string_view sym) const {
    return tok_.kind == TokKind::symbol && tok_.text == sym;
  }

  bool expect_symbol(std::string_view sym) {
    if (!is_symbol(sym)) {
      error_ = {tok_.column, "expected '" + std::string(sym) + "', found '" + describe(tok_) + "'"};
      return false;
    }
    return advance();
  }

  static std::string describe(const Token& tok) {
    switch (tok.kind) {
      case TokKind::end: return "end of formula";
      case TokKind::string: return "\"" + tok.text + "\"";
      default: return tok.text;
    }
  }

  ExprPtr parse_expression() {
    ExprPtr lhs = parse_term();
    if (!lhs) {
      return nullptr;
    }
    while (is_symbol("+") || is_symbol("-")) {
      BinaryOp op = tok_.text == "+" ? BinaryOp::add : BinaryOp::sub;
      if (!advance()) {
        return nullptr;
      }
      ExprPtr rhs = parse_term();
      if (!rhs) {
        return nullptr;
      }
      lhs = make_expr(BinaryExpr{op, std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    if (!lhs) {
      return nullptr;
    }
    while (is_symbol("*") || is_symbol("/")) {
      BinaryOp op = tok_.text == "*" ? BinaryOp::mul : BinaryOp::divide;
      if (!advance()) {
        return nullptr;
      }
      ExprPtr rhs = parse_factor();
      if (!rhs) {
        return nullptr;
      }
      lhs = make_expr(BinaryExpr{op, std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  ExprPtr parse_factor() {
    if (tok_.kind == TokKind::number) {
      double value = tok_.number;
      if (!advance()) {
        return nullptr;
      }
      return make_expr(NumberLit{value});
    }
    if (is_symbol("(")) {
      if (!advance()) {
        return nullptr;
      }
      ExprPtr inner = parse_expression();
      if (!inner || !expect_symbol(")")) {
        return nullptr;
      }
      return inner;
    }
    if (tok_.kind == TokKind::ident) {
      return parse_call();
    }
    error_ = {tok_.column, "expected a number, function call or '(', found '" + describe(tok_) + "'"};
    return nullptr;
  }

  ExprPtr parse_call() {
    Token name = tok_;
    if (!advance()) {
      return nullptr;
    }
    if (!is_symbol("(")) {
      error_ = {name.column, "unknown symbol '" + name.text + "' (expected a function call)"};
      return nullptr;
    }
    if (!advance()) {
      return nullptr;
    }
    if (name.text == "param") {
      return parse_param(name);
    }
    if (name.text == "count") {
      return parse_aggregate(Aggregate::count);
    }
    if (name.text == "sum") {
      return parse_aggregate(Aggregate::sum);
    }
    if (name.text == "distinct") {
      return parse_aggregate(Aggregate::distinct);
    }
    if (name.text == "ratio") {
      return parse_ratio();
    }
    error_ = {name.column, "unknown function '" + name.text + "'"};
    return nullptr;
  }

  ExprPtr parse_param(const Token& name) {
    if (tok_.kind != TokKind::string) {
      error_ = {tok_.column, "param expects a quoted parameter name"};
      return nullptr;
    }
    std::string pname = tok_.text;
    if (pname.empty()) {
      error_ = {name.column, "param name must be non-empty"};
      return nullptr;
    }
    if (!advance() || !expect_symbol(")")) {
      return nullptr;
    }
    return make_expr(ParamRef{std::move(pname)});
  }

  bool parse_name(std::string& out, std::string_view what) {
    if (tok_.kind != TokKind::ident) {
      error_ = {tok_.column, "expected " + std::string(what) + " name, found '" + describe(tok_) + "'"};
      return false;
    }
    out = tok_.text;
    return advance();
  }

  ExprPtr parse_aggregate(Aggregate fn) {
    AggregateCall call;
    call.fn = fn;
    if (!parse_name(call.kind, "evidence kind")) {
      return nullptr;
    }
    if (fn == Aggregate::sum || fn == Aggregate::distinct) {
      if (!expect_symbol(",") || !parse_name(call.field, "field")) {
        return nullptr;
      }
    }
    while (is_symbol(",")) {
      if (fn == Aggregate::distinct) {
        error_ = {tok_.column, "distinct takes exactly two arguments"};
        return nullptr;
      }
      if (!advance()) {
        return nullptr;
      }
      std::optional<Predicate> pred = parse_predicate();
      if (!pred) {
        return nullptr;
      }
      call.predicates.push_back(std::move(*pred));
    }
    if (!expect_symbol(")")) {
      return nullptr;
    }
    return make_expr(std::move(call));
  }

  std::optional<Predicate> parse_predicate() {
    Predicate pred;
    if (!parse_name(pred.field, "field")) {
      return std::nullopt;
    }
    if (tok_.kind != TokKind::symbol) {
      error_ = {tok_.column, "expected comparison operator, found '" + describe(tok_) + "'"};
      return std::nullopt;
    }
    if (tok_.text == "==") {
      pred.op = CompareOp::eq;
    } else if (tok_.text == "!=") {
      pred.op = CompareOp::ne;
    } else if (tok_.text == "<") {
      pred.op = CompareOp::lt;
    } else if (tok_.text == "<=") {
      pred.op = CompareOp::le;
    } else if (tok_.text == ">") {
      pred.op = CompareOp::gt;
    } else if (tok_.text == ">=") {
      pred.op = CompareOp::ge;
    } else {
      error_ = {tok_.column, "expected comparison operator, found '" + describe(tok_) + "'"};
      return std::nullopt;
    }
    if (!advance()) {
      return std::nullopt;
    }
    if (tok_.kind == TokKind::number) {
      pred.literal = tok_.number;
    } else if (tok_.kind == TokKind::string) {
      pred.literal = tok_.text;
    } else {
      error_ = {tok_.column, "predicate literal must be a number or a quoted string"};
      return std::nullopt;
    }
    if (!advance()) {
      return std::nullopt;
    }
    return pred;
  }

  ExprPtr parse_ratio() {
    ExprPtr numerator = parse_expression();
    if (!numerator || !expect_symbol(",")) {
      return nullptr;
    }
    ExprPtr denominator = parse_expression();
    if (!denominator || !expect_symbol(")")) {
      return nullptr;
    }
    return make_expr(RatioCall{std::move(numerator), std::move(denominator)});
  }

  ExprLexer lexer_;
  Token tok_;
  std::optional<ExprError> error_;
};

}  // namespace detail

inline ExprParse parse_expr(std::string_view src) {
  return detail::ExprParser(src).run();
}

// --- printing ---------------------------------------------------------------

namespace detail {

inline void print_quoted(std::string& out, std::string_view s) {
  out += '"';
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
    }
    out += c;
  }
  out += '"';
}

inline void print_predicate(std::string& out, const Predicate& pred) {
  out += pred.field;
  out += ' ';
  out += compare_op_symbol(pred.op);
  out += ' ';
  if (const double* num = std::get_if<double>(&pred.literal)) {
    out += format_decimal(*num);
  } else {
    print_quoted(out, std::get<std::string>(pred.literal));
  }
}

inline int precedence(const Expr& e) {
  if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) {
    return (bin->op == BinaryOp::add || bin->op == BinaryOp::sub) ? 1 : 2;
  }
  return 3;
}

inline void print_node(std::string& out, const Expr& e, int parent_prec, bool right_side) {
  int prec = precedence(e);
  // the grammar is left-associative, so an equal-precedence right child
  // keeps its parentheses
  bool parens = prec < parent_prec || (prec == parent_prec && right_side && prec < 3);
  if (parens) {
    out += '(';
  }
  if (const auto* num = std::get_if<NumberLit>(&e.node)) {
    out += format_decimal(num->value);
  } else if (const auto* param = std::get_if<ParamRef>(&e.node)) {
    out += "param(";
    print_quoted(out, param->name);
    out += ')';
  } else if (const auto* bin = std::get_if<BinaryExpr>(&e.node)) {
    print_node(out, *bin->lhs, prec, false);
    out += ' ';
    out += binary_op_symbol(bin->op);
    out += ' ';
    print_node(out, *bin->rhs, prec, true);
  } else if (const auto* agg = std::get_if<AggregateCall>(&e.node)) {
    out += aggregate_name(agg->fn);
    out += '(';
    out += agg->kind;
    if (agg->fn != Aggregate::count) {
      out += ", ";
      out += agg->field;
    }
    for (const Predicate& pred : agg->predicates) {
      out += ", ";
      print_predicate(out, pred);
    }
    out += ')';
  } else {
    const auto& ratio = std::get<RatioCall>(e.node);
    out += "ratio(";
    print_node(out, *ratio.numerator, 0, false);
    out += ", ";
    print_node(out, *ratio.denominator, 0, false);
    out += ')';
  }
  if (parens) {
    out += ')';
  }
}

}  // namespace detail

// Canonical text with minimal parentheses; parse_expr(print_expr(e))
// reproduces the same tree.
inline std::string print_expr(const Expr& e) {
  std::string out;
  detail::print_node(out, e, 0, false);
  return out;
}

}  // namespace gqm
