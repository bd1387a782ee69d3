#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spinframe/expr.hpp"

using namespace spinframe;

TEST_CASE("parse and eval basics") {
  ExprPtr unit_norm = parse("1/sqrt(1+x1^2+x2^2+x3^2)");
  CHECK(eval(unit_norm, {5.0, 0.0, 0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(eval(unit_norm, {0.0, 1.0, 0.0, 0.0}) == doctest::Approx(0.7071067811865476).epsilon(1e-15));

  CHECK(eval(parse("2*x2/(1+x1^2+x2^2+x3^2)"), {0.0, 1.0, 0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(eval(parse("x0"), {3.0, 0.0, 0.0, 0.0}) == doctest::Approx(3.0));
}

TEST_CASE("syntax errors carry byte offsets") {
  try {
    parse("x1 + * 2");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset == 5);
  }

  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("foo(1)"), ParseError);
  CHECK_THROWS_AS(parse("x7"), ParseError);
  CHECK_THROWS_AS(parse("x1^x2"), ParseError);
  CHECK_THROWS_AS(parse("x1^2.5"), ParseError);
  CHECK_THROWS_AS(parse("(x1"), ParseError);
  CHECK_THROWS_AS(parse("x1 x2"), ParseError);
}

TEST_CASE("domain errors name the subexpression") {
  ExprPtr pole = parse("1/(x1-1)");
  try {
    eval(pole, {0.0, 1.0, 0.0, 0.0});
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("division by zero") != std::string::npos);
  }
  CHECK_THROWS_AS(eval(parse("sqrt(x1-2)"), {0.0, 0.0, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(eval(parse("x1^-1"), {0.0, 0.0, 0.0, 0.0}), DomainError);
}

TEST_CASE("operator precedence") {
  // ^ binds tighter than unary minus, * tighter than +
  CHECK(eval(parse("-x1^2"), {0.0, 3.0, 0.0, 0.0}) == doctest::Approx(-9.0));
  CHECK(eval(parse("2+3*4"), {0, 0, 0, 0}) == doctest::Approx(14.0));
  CHECK(eval(parse("2*3^2"), {0, 0, 0, 0}) == doctest::Approx(18.0));
  CHECK(eval(parse("10-4-3"), {0, 0, 0, 0}) == doctest::Approx(3.0));  // left associative
  CHECK(eval(parse("16/4/2"), {0, 0, 0, 0}) == doctest::Approx(2.0));
  CHECK(eval(parse("x1^-2"), {0.0, 2.0, 0.0, 0.0}) == doctest::Approx(0.25));
  CHECK(eval(parse(" 1 +   2 "), {0, 0, 0, 0}) == doctest::Approx(3.0));
}

TEST_CASE("eval_dual matches hand derivatives") {
  Dual4 d = eval_dual(parse("x1^2"), {0.0, 3.0, 0.0, 0.0});
  CHECK(d.v == doctest::Approx(9.0));
  CHECK(d.d[0] == doctest::Approx(0.0));
  CHECK(d.d[1] == doctest::Approx(6.0));

  d = eval_dual(parse("sqrt(1+x1^2)"), {0.0, 1.0, 0.0, 0.0});
  CHECK(d.v == doctest::Approx(std::sqrt(2.0)));
  CHECK(d.d[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(d.d[2] == doctest::Approx(0.0));

  d = eval_dual(parse("5"), {1.0, 2.0, 3.0, 4.0});
  CHECK(d.v == doctest::Approx(5.0));
  for (double g : d.d) CHECK(g == doctest::Approx(0.0));
}

namespace {

// Random expression over a grammar that stays inside function domains.
std::string random_expr(oracles::Rng& rng, int depth) {
  if (depth == 0) {
    if (rng.uniform_int(0, 1) == 0) return "x" + std::to_string(rng.uniform_int(0, 3));
    return oracles::num(rng.uniform(-2.0, 2.0));
  }
  switch (rng.uniform_int(0, 7)) {
    case 0: return "(" + random_expr(rng, depth - 1) + "+" + random_expr(rng, depth - 1) + ")";
    case 1: return "(" + random_expr(rng, depth - 1) + "-" + random_expr(rng, depth - 1) + ")";
    case 2: return "(" + random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1) + ")";
    case 3: return "(" + random_expr(rng, depth - 1) + "/(4+(" + random_expr(rng, depth - 1) + ")^2))";
    case 4: return "sin(" + random_expr(rng, depth - 1) + ")";
    case 5: return "cos(" + random_expr(rng, depth - 1) + ")";
    case 6: return "tanh(" + random_expr(rng, depth - 1) + ")";
    default: return "sqrt(1+(" + random_expr(rng, depth - 1) + ")^2)";
  }
}

}  // namespace

TEST_CASE("autodiff gradient agrees with central finite differences") {
  oracles::Rng rng(101);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ExprPtr e = parse(random_expr(rng, 3));
    Vec4 x = oracles::random_point(rng, 1.0);
    Dual4 ad = eval_dual(e, x);
    for (int j = 0; j < 4; ++j) {
      double h = 1e-6 * (1.0 + std::fabs(x[static_cast<std::size_t>(j)]));
      Vec4 xp = x, xm = x;
      xp[static_cast<std::size_t>(j)] += h;
      xm[static_cast<std::size_t>(j)] -= h;
      double fd = (eval(e, xp) - eval(e, xm)) / (2.0 * h);
      CHECK(std::fabs(ad.d[static_cast<std::size_t>(j)] - fd) / (1.0 + std::fabs(ad.d[static_cast<std::size_t>(j)])) < 1e-5);
      ++checked;
    }
  }
  CHECK(checked == 400);
}

TEST_CASE("second-order duals give exact Hessians") {
  ExprPtr e = parse("x1^3 + x1*x2^2");
  Dual4x2 d = eval_as<Dual4x2>(e, {0.0, 2.0, 3.0, 0.0});
  CHECK(d.v.v == doctest::Approx(8.0 + 18.0));
  CHECK(d.v.d[1] == doctest::Approx(3.0 * 4.0 + 9.0));  // 3 x1^2 + x2^2
  CHECK(d.d[1].d[1] == doctest::Approx(6.0 * 2.0));     // 6 x1
  CHECK(d.d[1].d[2] == doctest::Approx(2.0 * 3.0));     // 2 x2
  CHECK(d.d[2].d[1] == doctest::Approx(d.d[1].d[2]));   // symmetry
}

TEST_CASE("canonical print is a parse fixed point") {
  oracles::Rng rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    std::string src = random_expr(rng, 3);
    std::string once = print(parse(src));
    std::string twice = print(parse(once));
    CHECK(once == twice);
  }
  CHECK(print(parse("1/sqrt(1+x1^2)")) == print(parse(print(parse("1/sqrt(1+x1^2)")))));
}
