#include "spinframe/expr.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace spinframe {

ExprPtr Expr::make_number(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::number;
  e->number = v;
  return e;
}

ExprPtr Expr::make_variable(int j) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::variable;
  e->var = j;
  return e;
}

ExprPtr Expr::make_neg(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::neg;
  e->a = std::move(a);
  return e;
}

ExprPtr Expr::make_binary(ExprKind k, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprPtr Expr::make_pow(ExprPtr a, int exponent) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::pow_int;
  e->a = std::move(a);
  e->exponent = exponent;
  return e;
}

ExprPtr Expr::make_call(FuncKind f, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::call;
  e->func = f;
  e->a = std::move(a);
  return e;
}

namespace {

struct Parser {
  std::string_view src;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool consume(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) {
    skip_ws();
    throw ParseError(msg, pos);
  }

  // expr := term (('+'|'-') term)*
  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    for (;;) {
      if (consume('+'))
        lhs = Expr::make_binary(ExprKind::add, std::move(lhs), parse_term());
      else if (consume('-'))
        lhs = Expr::make_binary(ExprKind::sub, std::move(lhs), parse_term());
      else
        return lhs;
    }
  }

  // term := factor (('*'|'/') factor)*
  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    for (;;) {
      if (consume('*'))
        lhs = Expr::make_binary(ExprKind::mul, std::move(lhs), parse_factor());
      else if (consume('/'))
        lhs = Expr::make_binary(ExprKind::div, std::move(lhs), parse_factor());
      else
        return lhs;
    }
  }

  // factor := '-' factor | power   (so ^ binds tighter than unary minus)
  ExprPtr parse_factor() {
    if (consume('-')) return Expr::make_neg(parse_factor());
    return parse_power();
  }

  // power := atom ('^' integer)*
  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    while (consume('^')) base = Expr::make_pow(std::move(base), parse_int_exponent());
    return base;
  }

  int parse_int_exponent() {
    skip_ws();
    std::size_t start = pos;
    bool neg = false;
    if (pos < src.size() && src[pos] == '-') {
      neg = true;
      ++pos;
    }
    std::size_t digits = 0;
    long value = 0;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
      value = value * 10 + (src[pos] - '0');
      if (value > 1000000) throw ParseError("exponent too large", start);
      ++digits;
      ++pos;
    }
    if (digits == 0) throw ParseError("exponent must be an integer literal", start);
    if (pos < src.size() && (src[pos] == '.' || src[pos] == 'e' || src[pos] == 'E'))
      throw ParseError("exponent must be an integer literal", start);
    return neg ? -static_cast<int>(value) : static_cast<int>(value);
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos >= src.size()) fail("unexpected end of input");
    char c = src[pos];
    if (c == '(') {
      ++pos;
      ExprPtr inner = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("unexpected character");
  }

  ExprPtr parse_number() {
    std::size_t start = pos;
    const char* begin = src.data() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", start);
    pos += static_cast<std::size_t>(end - begin);
    return Expr::make_number(v);
  }

  ExprPtr parse_identifier() {
    std::size_t start = pos;
    while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    std::string_view name = src.substr(start, pos - start);
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '0' && name[1] <= '3')
      return Expr::make_variable(name[1] - '0');
    FuncKind f;
    if (name == "sqrt")
      f = FuncKind::fn_sqrt;
    else if (name == "sin")
      f = FuncKind::fn_sin;
    else if (name == "cos")
      f = FuncKind::fn_cos;
    else if (name == "exp")
      f = FuncKind::fn_exp;
    else if (name == "tanh")
      f = FuncKind::fn_tanh;
    else
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    if (!consume('(')) fail("expected '(' after function name");
    ExprPtr arg = parse_expr();
    if (!consume(')')) fail("expected ')'");
    return Expr::make_call(f, std::move(arg));
  }
};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* func_name(FuncKind f) {
  switch (f) {
    case FuncKind::fn_sqrt: return "sqrt";
    case FuncKind::fn_sin: return "sin";
    case FuncKind::fn_cos: return "cos";
    case FuncKind::fn_exp: return "exp";
    case FuncKind::fn_tanh: return "tanh";
  }
  return "?";
}

void print_node(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::number:
      out += format_double(e.number);
      return;
    case ExprKind::variable:
      out += 'x';
      out += static_cast<char>('0' + e.var);
      return;
    case ExprKind::neg:
      out += "(-";
      print_node(*e.a, out);
      out += ')';
      return;
    case ExprKind::add:
    case ExprKind::sub:
    case ExprKind::mul:
    case ExprKind::div: {
      char op = e.kind == ExprKind::add   ? '+'
                : e.kind == ExprKind::sub ? '-'
                : e.kind == ExprKind::mul ? '*'
                                          : '/';
      out += '(';
      print_node(*e.a, out);
      out += op;
      print_node(*e.b, out);
      out += ')';
      return;
    }
    case ExprKind::pow_int:
      out += '(';
      print_node(*e.a, out);
      out += '^';
      out += std::to_string(e.exponent);
      out += ')';
      return;
    case ExprKind::call:
      out += func_name(e.func);
      out += '(';
      print_node(*e.a, out);
      out += ')';
      return;
  }
}

}  // namespace

ExprPtr parse(std::string_view src) {
  Parser p{src};
  if (p.at_end()) throw ParseError("empty expression", 0);
  ExprPtr e = p.parse_expr();
  if (!p.at_end()) p.fail("unexpected trailing input");
  return e;
}

ExprPtr parse_named(std::string_view src, const std::string& field) {
  try {
    return parse(src);
  } catch (const ParseError& pe) {
    throw SchemaError("in expression for '" + field + "': " + pe.what());
  }
}

std::string print(const ExprPtr& e) {
  std::string out;
  print_node(*e, out);
  return out;
}

namespace expr_detail {

void throw_domain(const Expr& node, const char* what) {
  std::string repr;
  print_node(node, repr);
  throw DomainError(std::string(what) + " in subexpression " + repr);
}

}  // namespace expr_detail

double eval(const ExprPtr& e, const Vec4& x) { return eval_as<double>(e, x); }
Dual4 eval_dual(const ExprPtr& e, const Vec4& x) { return eval_as<Dual4>(e, x); }

}  // namespace spinframe
