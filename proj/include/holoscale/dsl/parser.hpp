// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "holoscale/dsl/expr.hpp"
#include "holoscale/dsl/lexer.hpp"

namespace holoscale::dsl {

/// Recursive-descent expression parser over a token stream.
///
///   expr  := term (('+' | '-') term)*
///   term  := unary (('*' | '/') unary)*
///   unary := '-' unary | power
///   power := atom ('^' unary)?
///   atom  := number | number'i' | ident | func '(' expr ')' | '(' expr ')'
class ExprParser {
 public:
  explicit ExprParser(const std::vector<Token>& toks, std::size_t pos = 0) : toks_(toks), pos_(pos) {}

  std::size_t position() const { return pos_; }
  void reset(std::size_t pos) { pos_ = pos; }
  const Token& peek() const { return toks_[pos_]; }

  Expr parse_expression() {
    ExprBuilder b;
    const auto root = expr(b);
    return b.finish(root);
  }

  /// Parses `'(' expr ',' expr ')'`.
  std::pair<Expr, Expr> parse_pair() {
    expect('(');
    auto first = parse_expression();
    expect(',');
    auto second = parse_expression();
    expect(')');
    return {std::move(first), std::move(second)};
  }

  void expect(char c) {
    if (!peek().is(c)) throw SyntaxError(peek().line, peek().col, std::string("'") + c + "'", peek().describe());
    ++pos_;
  }

 private:
  std::int32_t expr(ExprBuilder& b) {
    auto lhs = term(b);
    while (peek().is('+') || peek().is('-')) {
      const Op op = peek().is('+') ? Op::Add : Op::Sub;
      ++pos_;
      lhs = b.binary(op, lhs, term(b));
    }
    return lhs;
  }

  std::int32_t term(ExprBuilder& b) {
    auto lhs = unary(b);
    while (peek().is('*') || peek().is('/')) {
      const Op op = peek().is('*') ? Op::Mul : Op::Div;
      ++pos_;
      lhs = b.binary(op, lhs, unary(b));
    }
    return lhs;
  }

  std::int32_t unary(ExprBuilder& b) {
    if (peek().is('-')) {
      ++pos_;
      return b.unary(Op::Neg, unary(b));
    }
    return power(b);
  }

  std::int32_t power(ExprBuilder& b) {
    auto base = atom(b);
    if (peek().is('^')) {
      ++pos_;
      return b.binary(Op::Pow, base, unary(b));
    }
    return base;
  }

  std::int32_t atom(ExprBuilder& b) {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: ++pos_; return b.constant(cd(t.number, 0.0));
      case Tok::Imaginary: ++pos_; return b.constant(cd(0.0, t.number));
      case Tok::Ident: return identifier(b);
      case Tok::Symbol:
        if (t.is('(')) {
          ++pos_;
          auto inner = expr(b);
          expect(')');
          return inner;
        }
        break;
      case Tok::End: break;
    }
    throw SyntaxError(t.line, t.col, "expression", t.describe());
  }

  std::int32_t identifier(ExprBuilder& b) {
    const Token t = peek();
    ++pos_;
    const std::string& s = t.text;
    if (s == "z") return b.variable(Var::Z);
    if (s == "w") return b.variable(Var::W);
    if (s == "a") return b.variable(Var::A);
    if (s == "j") return b.variable(Var::J);
    if (s == "u") return b.unary(Op::Re, b.variable(Var::W));
    if (s == "zb") return b.unary(Op::Conj, b.variable(Var::Z));
    if (s == "wb") return b.unary(Op::Conj, b.variable(Var::W));
    if (s == "i") return b.constant(cd(0.0, 1.0));
    if (s == "pi") return b.constant(cd(3.14159265358979323846, 0.0));
    static constexpr std::pair<std::string_view, Op> kFunctions[] = {
        {"re", Op::Re},   {"im", Op::Im},   {"abs", Op::Abs},   {"conj", Op::Conj},
        {"exp", Op::Exp}, {"log", Op::Log}, {"sqrt", Op::Sqrt}, {"neg", Op::Neg},
    };
    for (const auto& [name, op] : kFunctions) {
      if (s == name) {
        expect('(');
        auto arg = expr(b);
        expect(')');
        return b.unary(op, arg);
      }
    }
    throw Error(ErrorKind::UnboundIdentifier, "parse",
                "line " + std::to_string(t.line) + ", col " + std::to_string(t.col) + ": unknown identifier '" +
                    s + "'");
  }

  const std::vector<Token>& toks_;
  std::size_t pos_;
};

/// Parses a standalone expression; trailing input is a syntax error.
inline Expr parse_expr(std::string_view source) {
  const auto toks = tokenize(source);
  ExprParser p(toks);
  auto e = p.parse_expression();
  if (p.peek().kind != Tok::End)
    throw SyntaxError(p.peek().line, p.peek().col, "operator or end of input", p.peek().describe());
  return e;
}

/// Evaluates an expression that must not reference any variable.
inline cd eval_constant(const Expr& e) { return e(Bindings{}); }

}  // namespace holoscale::dsl
