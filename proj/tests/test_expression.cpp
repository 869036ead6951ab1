#include "fountain/expression.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace fountain;

namespace {
double ev(const std::string& s) { return Expression::parse(s, 0).eval(); }
}

TEST_CASE("precedence and associativity") {
  CHECK(ev("1 + 2 * 3") == 7.0);
  CHECK(ev("(1 + 2) * 3") == 9.0);
  CHECK(ev("2 ^ 3 ^ 2") == 512.0);
  CHECK(ev("-2 ^ 2") == -4.0);
  CHECK(ev("2 ^ -1") == 0.5);
  CHECK(ev("8 / 4 / 2") == 1.0);
  CHECK(ev("10 - 4 - 3") == 3.0);
  CHECK(ev("1.5e2") == 150.0);
  CHECK(ev("2*pi") == doctest::Approx(2.0 * std::numbers::pi));
}

TEST_CASE("functions") {
  CHECK(ev("abs(-3)") == 3.0);
  CHECK(ev("sqrt(16)") == 4.0);
  CHECK(ev("log(exp(2))") == doctest::Approx(2.0));
  CHECK(ev("sin(0) + cos(0) + tan(0)") == 1.0);
}

TEST_CASE("variables") {
  const auto e = Expression::parse("u1 * t + r^2 + T", 2);
  const std::vector<double> u{3.0, 4.0};
  CHECK(e.eval(2.0, u, 10.0) == doctest::Approx(6.0 + 25.0 + 10.0));
  CHECK(e.uses_time());
  CHECK(e.uses_state());
  const auto s = Expression::parse("u^2", 1);
  const std::vector<double> x{-3.0};
  CHECK(s.eval(0.0, x, 1.0) == 9.0);
  CHECK_FALSE(s.uses_time());
}

TEST_CASE("errors carry a position") {
  CHECK_THROWS_AS(Expression::parse("1 +", 0), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("(1 + 2", 0), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("foo(1)", 0), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("u3", 2), ExpressionError);
  CHECK_THROWS_AS(Expression::parse("u", 2), ExpressionError);
  try {
    Expression::parse("1 + $", 0);
    FAIL("no throw");
  } catch (const ExpressionError& e) {
    CHECK(e.position() == 4);
  }
  CHECK_THROWS_AS(Expression::parse("t + 1", 0).eval(), std::invalid_argument);
}

TEST_CASE("constant numbers") {
  CHECK(parse_number("0.25") == 0.25);
  CHECK(parse_number("pi/2") == doctest::Approx(std::numbers::pi / 2));
  CHECK_THROWS(parse_number("u"));
}

TEST_CASE("expression potentials") {
  const auto w = expression_potential("r^4 / 4", {}, 2, 1.0, true);
  CHECK(w.autonomous);
  CHECK(w.even);
  const std::vector<double> u{0.3, -1.2};
  const auto g = w.grad(0.0, u);
  const double r2 = 0.09 + 1.44;
  CHECK(g[0] == doctest::Approx(r2 * 0.3).epsilon(1e-7));
  CHECK(g[1] == doctest::Approx(r2 * -1.2).epsilon(1e-7));
  const auto m = expression_potential("(1 + cos(2*pi*t/T)/2) * abs(u)^3", {"(1 + cos(2*pi*t/T)/2) * 3 * u * abs(u)"}, 1,
                                      2.0, true);
  CHECK_FALSE(m.autonomous);
  const std::vector<double> x{0.7};
  CHECK(m.W(1.0, x) == doctest::Approx(0.5 * 0.343));
  CHECK(m.grad(0.0, x)[0] == doctest::Approx(1.5 * 3 * 0.49));
  CHECK_THROWS_AS(expression_potential("u1", {"1"}, 2, 1.0, false), std::invalid_argument);
}
