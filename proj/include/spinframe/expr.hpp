#pragma once
#include <array>
#include <memory>
#include <string>
#include <string_view>

#include "spinframe/dual.hpp"
#include "spinframe/errors.hpp"
#include "spinframe/signature.hpp"

namespace spinframe {

// Immutable AST for scalar coefficient functions of (x0, x1, x2, x3).
// Grammar: + - * / ^(integer literal) unary minus, parentheses, and the
// functions sqrt, sin, cos, exp, tanh.
class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind { number, variable, neg, add, sub, mul, div, pow_int, call };
enum class FuncKind { fn_sqrt, fn_sin, fn_cos, fn_exp, fn_tanh };

class Expr {
 public:
  ExprKind kind;
  double number = 0.0;   // number
  int var = 0;           // variable: 0..3
  int exponent = 0;      // pow_int
  FuncKind func = FuncKind::fn_sqrt;
  ExprPtr a, b;

  static ExprPtr make_number(double v);
  static ExprPtr make_variable(int j);
  static ExprPtr make_neg(ExprPtr a);
  static ExprPtr make_binary(ExprKind k, ExprPtr a, ExprPtr b);
  static ExprPtr make_pow(ExprPtr a, int exponent);
  static ExprPtr make_call(FuncKind f, ExprPtr a);
};

// Throws ParseError with a byte offset on malformed input.
ExprPtr parse(std::string_view src);

// Canonical fully parenthesized form; parse(print(e)) reproduces e.
std::string print(const ExprPtr& e);

// Convenience: parse, but tag errors with the field name for job files.
ExprPtr parse_named(std::string_view src, const std::string& field);

namespace expr_detail {

[[noreturn]] void throw_domain(const Expr& node, const char* what);

template <class T>
T eval_node(const Expr& e, const std::array<T, 4>& vars) {
  switch (e.kind) {
    case ExprKind::number:
      return T(e.number);
    case ExprKind::variable:
      return vars[static_cast<std::size_t>(e.var)];
    case ExprKind::neg:
      return -eval_node<T>(*e.a, vars);
    case ExprKind::add:
      return eval_node<T>(*e.a, vars) + eval_node<T>(*e.b, vars);
    case ExprKind::sub:
      return eval_node<T>(*e.a, vars) - eval_node<T>(*e.b, vars);
    case ExprKind::mul:
      return eval_node<T>(*e.a, vars) * eval_node<T>(*e.b, vars);
    case ExprKind::div: {
      T den = eval_node<T>(*e.b, vars);
      if (scalar_value(den) == 0.0) throw_domain(e, "division by zero");
      return eval_node<T>(*e.a, vars) / den;
    }
    case ExprKind::pow_int: {
      T base = eval_node<T>(*e.a, vars);
      if (e.exponent < 0 && scalar_value(base) == 0.0) throw_domain(e, "division by zero");
      return pow_int(base, e.exponent);
    }
    case ExprKind::call: {
      T arg = eval_node<T>(*e.a, vars);
      using std::cos;
      using std::exp;
      using std::sin;
      using std::sqrt;
      using std::tanh;
      switch (e.func) {
        case FuncKind::fn_sqrt:
          if (scalar_value(arg) < 0.0) throw_domain(e, "sqrt of a negative value");
          return sqrt(arg);
        case FuncKind::fn_sin:
          return sin(arg);
        case FuncKind::fn_cos:
          return cos(arg);
        case FuncKind::fn_exp:
          return exp(arg);
        case FuncKind::fn_tanh:
          return tanh(arg);
      }
      throw_domain(e, "unknown function");
    }
  }
  throw_domain(e, "malformed expression node");
}

}  // namespace expr_detail

// Evaluate over any scalar type (double, Dual4, Dual4x2).
template <class T>
T eval_as(const ExprPtr& e, const Vec4& x) {
  std::array<T, 4> vars;
  for (int j = 0; j < 4; ++j) seed_variable(vars[j], x[static_cast<std::size_t>(j)], j);
  return expr_detail::eval_node<T>(*e, vars);
}

double eval(const ExprPtr& e, const Vec4& x);
Dual4 eval_dual(const ExprPtr& e, const Vec4& x);

}  // namespace spinframe
