// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "holoscale/dual.hpp"
#include "holoscale/error.hpp"
#include "holoscale/linalg.hpp"

namespace holoscale::dsl {

/// Free variables of the expression language. `u`, `zb` and `wb` are sugar
/// for re(w), conj(z) and conj(w) and never appear as variables.
enum class Var : std::uint8_t { Z = 0, W = 1, A = 2, J = 3 };
inline constexpr std::size_t kVarCount = 4;

constexpr std::string_view to_string(Var v) {
  switch (v) {
    case Var::Z: return "z";
    case Var::W: return "w";
    case Var::A: return "a";
    case Var::J: return "j";
  }
  return "?";
}

enum class Op : std::uint8_t {
  Const,
  Variable,
  Neg,
  Re,
  Im,
  Abs,
  Conj,
  Exp,
  Log,
  Sqrt,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

constexpr bool is_unary(Op op) { return op >= Op::Neg && op <= Op::Sqrt; }
constexpr bool is_binary(Op op) { return op >= Op::Add; }

/// Operations that are not complex-differentiable in their argument.
constexpr bool is_antiholomorphic_op(Op op) {
  return op == Op::Re || op == Op::Im || op == Op::Abs || op == Op::Conj;
}

constexpr std::string_view function_name(Op op) {
  switch (op) {
    case Op::Neg: return "neg";
    case Op::Re: return "re";
    case Op::Im: return "im";
    case Op::Abs: return "abs";
    case Op::Conj: return "conj";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    default: return "";
  }
}

struct Node {
  Op op = Op::Const;
  Var var = Var::Z;
  cd value{};
  std::int32_t lhs = -1;
  std::int32_t rhs = -1;
};

/// Named values for the free variables of an expression.
template <class T>
class BasicBindings {
 public:
  BasicBindings() = default;

  BasicBindings& set(Var v, T value) {
    slots_[static_cast<std::size_t>(v)] = std::move(value);
    return *this;
  }
  /// Bind by source name; `u` binds w to a real value.
  BasicBindings& set(std::string_view name, T value) {
    if (name == "z") return set(Var::Z, std::move(value));
    if (name == "w" || name == "u") return set(Var::W, std::move(value));
    if (name == "a") return set(Var::A, std::move(value));
    if (name == "j") return set(Var::J, std::move(value));
    throw Error(ErrorKind::UnboundIdentifier, "eval", "unknown variable '" + std::string(name) + "'");
  }
  const std::optional<T>& get(Var v) const { return slots_[static_cast<std::size_t>(v)]; }

 private:
  std::array<std::optional<T>, kVarCount> slots_{};
};

using Bindings = BasicBindings<cd>;

namespace detail {

inline bool is_zero(cd x) { return x == cd{}; }

template <class T>
cd value_of(const T& x) {
  if constexpr (std::is_same_v<T, cd>)
    return x;
  else
    return x.val;
}

template <class T>
bool is_constant(const T& x) {
  if constexpr (std::is_same_v<T, cd>)
    return true;
  else
    return x.is_constant();
}

inline std::optional<long> as_small_integer(cd p) {
  if (p.imag() != 0.0) return std::nullopt;
  const double r = p.real();
  if (std::abs(r) > 1024.0 || std::round(r) != r) return std::nullopt;
  return static_cast<long>(r);
}

template <class T>
T integer_power(T x, long n) {
  T result(1.0);
  T base = x;
  unsigned long e = static_cast<unsigned long>(n < 0 ? -n : n);
  while (e != 0) {
    if (e & 1UL) result = result * base;
    e >>= 1UL;
    if (e != 0) base = base * base;
  }
  if (n < 0) {
    if (is_zero(value_of(result)))
      throw Error(ErrorKind::DivisionByZero, "eval", "negative integer power of zero");
    result = T(1.0) / result;
  }
  return result;
}

inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Immutable expression tree. Nodes live in a shared flat array; copies are
/// cheap and safe to read concurrently.
class Expr {
 public:
  Expr() = default;
  Expr(std::shared_ptr<const std::vector<Node>> nodes, std::int32_t root)
      : nodes_(std::move(nodes)), root_(root) {}

  bool empty() const { return !nodes_; }
  std::int32_t root() const { return root_; }
  const Node& node(std::int32_t i) const { return (*nodes_)[static_cast<std::size_t>(i)]; }

  std::size_t node_count() const { return empty() ? 0 : count_from(root_); }

  bool depends_on(Var v) const { return !empty() && depends_from(root_, [v](Var x) { return x == v; }); }

  /// True when the tree depends on z or w.
  bool depends_on_point() const {
    return !empty() && depends_from(root_, [](Var x) { return x == Var::Z || x == Var::W; });
  }

  /// Syntactic holomorphy in (z, w): no re/im/abs/conj applied to a
  /// subtree that depends on z or w. Parameters a and j may appear anywhere.
  bool holomorphic() const { return !empty() && holomorphic_from(root_); }

  std::string to_string() const { return empty() ? std::string() : print(root_); }

  template <class T>
  T evaluate(const BasicBindings<T>& b) const {
    return eval_from<T>(root_, b);
  }

  cd operator()(const Bindings& b) const { return evaluate<cd>(b); }

  /// log|e| evaluated without forming e where the tree allows it (products,
  /// quotients, real powers and exponentials), so values far below the
  /// double range stay representable.
  double log_abs(const Bindings& b) const { return log_abs_from(root_, b); }

 private:
  std::size_t count_from(std::int32_t i) const {
    const Node& n = node(i);
    std::size_t c = 1;
    if (n.lhs >= 0) c += count_from(n.lhs);
    if (n.rhs >= 0) c += count_from(n.rhs);
    return c;
  }

  template <class Pred>
  bool depends_from(std::int32_t i, Pred pred) const {
    const Node& n = node(i);
    if (n.op == Op::Variable) return pred(n.var);
    return (n.lhs >= 0 && depends_from(n.lhs, pred)) || (n.rhs >= 0 && depends_from(n.rhs, pred));
  }

  bool holomorphic_from(std::int32_t i) const {
    const Node& n = node(i);
    if (is_antiholomorphic_op(n.op))
      return !depends_from(n.lhs, [](Var x) { return x == Var::Z || x == Var::W; });
    return (n.lhs < 0 || holomorphic_from(n.lhs)) && (n.rhs < 0 || holomorphic_from(n.rhs));
  }

  static int precedence(Op op) {
    switch (op) {
      case Op::Add:
      case Op::Sub: return 1;
      case Op::Mul:
      case Op::Div: return 2;
      case Op::Neg: return 3;
      case Op::Pow: return 4;
      default: return 5;
    }
  }

  int precedence_of(std::int32_t i) const {
    const Node& n = node(i);
    if (n.op == Op::Const) {
      // Literals that print with a sign or as a sum are wrapped by print().
      return 5;
    }
    return precedence(n.op);
  }

  static std::string print_constant(cd v) {
    const double re = v.real(), im = v.imag();
    if (im == 0.0) {
      auto s = detail::format_double(re);
      return (re < 0.0 || std::signbit(re)) ? "(" + s + ")" : s;
    }
    if (re == 0.0 && !std::signbit(re)) {
      if (im == 1.0) return "i";
      auto s = detail::format_double(im) + "i";
      return im < 0.0 ? "(" + s + ")" : s;
    }
    std::string s = "(" + detail::format_double(re);
    s += im < 0.0 ? "-" : "+";
    s += detail::format_double(std::abs(im)) + "i)";
    return s;
  }

  std::string wrap(std::int32_t i, bool parens) const {
    auto s = print(i);
    return parens ? "(" + s + ")" : s;
  }

  std::string print(std::int32_t i) const {
    const Node& n = node(i);
    switch (n.op) {
      case Op::Const: return print_constant(n.value);
      case Op::Variable: return std::string(holoscale::dsl::to_string(n.var));
      case Op::Neg: return "-" + wrap(n.lhs, precedence_of(n.lhs) < 3);
      case Op::Re:
      case Op::Im:
      case Op::Abs:
      case Op::Conj:
      case Op::Exp:
      case Op::Log:
      case Op::Sqrt: return std::string(function_name(n.op)) + "(" + print(n.lhs) + ")";
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div: {
        const int p = precedence(n.op);
        const char* sym = n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? "*" : "/";
        return wrap(n.lhs, precedence_of(n.lhs) < p) + sym + wrap(n.rhs, precedence_of(n.rhs) <= p);
      }
      case Op::Pow: return wrap(n.lhs, precedence_of(n.lhs) < 5) + "^" + wrap(n.rhs, precedence_of(n.rhs) < 3);
    }
    return {};
  }

  template <class T>
  T eval_from(std::int32_t i, const BasicBindings<T>& b) const {
    const Node& n = node(i);
    switch (n.op) {
      case Op::Const: return T(n.value);
      case Op::Variable: {
        const auto& v = b.get(n.var);
        if (!v)
          throw Error(ErrorKind::UnboundIdentifier, "eval",
                      "variable '" + std::string(holoscale::dsl::to_string(n.var)) + "' is not bound");
        return *v;
      }
      case Op::Neg: return -eval_from<T>(n.lhs, b);
      case Op::Re:
      case Op::Im:
      case Op::Abs:
      case Op::Conj: {
        const T x = eval_from<T>(n.lhs, b);
        if (!detail::is_constant(x))
          throw Error(ErrorKind::EvaluationError, "eval",
                      std::string(function_name(n.op)) + " is not complex-differentiable");
        const cd v = detail::value_of(x);
        switch (n.op) {
          case Op::Re: return T(cd(v.real(), 0.0));
          case Op::Im: return T(cd(v.imag(), 0.0));
          case Op::Abs: return T(cd(std::abs(v), 0.0));
          default: return T(std::conj(v));
        }
      }
      case Op::Exp: {
        using std::exp;
        return exp(eval_from<T>(n.lhs, b));
      }
      case Op::Log: {
        using std::log;
        const T x = eval_from<T>(n.lhs, b);
        if (detail::is_zero(detail::value_of(x)))
          throw Error(ErrorKind::BranchCutViolation, "eval", "log of zero");
        return log(x);
      }
      case Op::Sqrt: {
        using std::sqrt;
        const T x = eval_from<T>(n.lhs, b);
        if (detail::is_zero(detail::value_of(x)))
          throw Error(ErrorKind::BranchCutViolation, "eval", "sqrt of zero");
        return sqrt(x);
      }
      case Op::Add: return eval_from<T>(n.lhs, b) + eval_from<T>(n.rhs, b);
      case Op::Sub: return eval_from<T>(n.lhs, b) - eval_from<T>(n.rhs, b);
      case Op::Mul: return eval_from<T>(n.lhs, b) * eval_from<T>(n.rhs, b);
      case Op::Div: {
        const T den = eval_from<T>(n.rhs, b);
        if (detail::is_zero(detail::value_of(den)))
          throw Error(ErrorKind::DivisionByZero, "eval", "division by zero in '" + print(i) + "'");
        return eval_from<T>(n.lhs, b) / den;
      }
      case Op::Pow: {
        const T base = eval_from<T>(n.lhs, b);
        const T expo = eval_from<T>(n.rhs, b);
        if (detail::is_constant(expo)) {
          const cd p = detail::value_of(expo);
          if (auto k = detail::as_small_integer(p)) return detail::integer_power(base, *k);
          if (detail::is_zero(detail::value_of(base)))
            throw Error(ErrorKind::BranchCutViolation, "eval", "non-integer power of zero");
          using std::pow;
          return pow(base, p);
        }
        if (detail::is_zero(detail::value_of(base)))
          throw Error(ErrorKind::BranchCutViolation, "eval", "non-integer power of zero");
        using std::exp;
        using std::log;
        return exp(expo * log(base));
      }
    }
    throw Error(ErrorKind::EvaluationError, "eval", "corrupt expression node");
  }

  double log_abs_from(std::int32_t i, const Bindings& b) const {
    const Node& n = node(i);
    switch (n.op) {
      case Op::Exp: return eval_from<cd>(n.lhs, b).real();
      case Op::Mul: return log_abs_from(n.lhs, b) + log_abs_from(n.rhs, b);
      case Op::Div: return log_abs_from(n.lhs, b) - log_abs_from(n.rhs, b);
      case Op::Neg:
      case Op::Abs:
      case Op::Conj: return log_abs_from(n.lhs, b);
      case Op::Sqrt: return 0.5 * log_abs_from(n.lhs, b);
      case Op::Pow: {
        const cd p = eval_from<cd>(n.rhs, b);
        if (p.imag() == 0.0) return p.real() * log_abs_from(n.lhs, b);
        break;
      }
      case Op::Add:
      case Op::Sub: {
        // An exactly vanishing summand leaves the other one unchanged.
        if (detail::is_zero(eval_from<cd>(n.rhs, b))) return log_abs_from(n.lhs, b);
        if (detail::is_zero(eval_from<cd>(n.lhs, b))) return log_abs_from(n.rhs, b);
        break;
      }
      default: break;
    }
    return std::log(std::abs(eval_from<cd>(i, b)));
  }

  std::shared_ptr<const std::vector<Node>> nodes_;
  std::int32_t root_ = -1;
};

/// Appends nodes into one flat array; used by the parser.
class ExprBuilder {
 public:
  std::int32_t constant(cd v) { return push({Op::Const, Var::Z, v, -1, -1}); }
  std::int32_t variable(Var v) { return push({Op::Variable, v, {}, -1, -1}); }
  std::int32_t unary(Op op, std::int32_t x) { return push({op, Var::Z, {}, x, -1}); }
  std::int32_t binary(Op op, std::int32_t l, std::int32_t r) { return push({op, Var::Z, {}, l, r}); }

  Expr finish(std::int32_t root) {
    return Expr(std::make_shared<const std::vector<Node>>(std::move(nodes_)), root);
  }

 private:
  std::int32_t push(Node n) {
    nodes_.push_back(n);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }
  std::vector<Node> nodes_;
};

}  // namespace holoscale::dsl
