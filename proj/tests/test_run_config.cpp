#include "fountain/run_config.hpp"

#include <doctest.h>

#include <algorithm>
#include <numbers>

using namespace fountain;

namespace {
const std::string kDuffing = R"(seed = 7

[problem]
period = 2*pi
dim = 1
nodes = 64
U = zero
mode = superquadratic

[potential]
kind = builtin
builtin = power
coefficient = 0.25
exponent = 4
)";

bool mentions(const ConfigError& e, const std::string& s) {
  return std::any_of(e.errors().begin(), e.errors().end(),
                     [&](const std::string& m) { return m.find(s) != std::string::npos; });
}

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}
}  // namespace

TEST_CASE("minimal Duffing configuration") {
  const RunConfig c = parse_config(kDuffing);
  CHECK(c.seed == 7);
  CHECK(c.problem.period == doctest::Approx(2 * std::numbers::pi));
  CHECK(c.problem.nodes == 64);
  CHECK(c.problem.mode == GrowthMode::superquadratic);
  const auto w = c.build_potential();
  CHECK(*w.constants.nu == 4.0);
  const auto ctx = c.context();
  CHECK(ctx.spectrum().n_zero() == 1);
  CHECK(c.audit_scheme().times.size() == 64);
}

TEST_CASE("nu at most 2 is rejected") {
  try {
    parse_config(kDuffing + "\n[hypotheses]\nnu = 1.5\n");
    FAIL("accepted");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "nu must exceed 2"));
  }
}

TEST_CASE("varrho equal to nu - 2 is rejected") {
  try {
    parse_config(kDuffing + "\n[hypotheses]\nnu = 4\nvarrho = 2\n");
    FAIL("accepted");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "(nu - 2, infinity)"));
  }
}

TEST_CASE("every error is reported") {
  const auto errs = errors_of(R"(
[problem]
nodes = 63
U = sometimes
colour = blue
[solver]
k = x
[nowhere]
a = 1
)");
  CHECK(errs.size() >= 5);
  const auto has = [&](const std::string& s) {
    return std::any_of(errs.begin(), errs.end(), [&](const std::string& m) { return m.find(s) != std::string::npos; });
  };
  CHECK(has("period"));
  CHECK(has("nodes"));
  CHECK(has("problem.U"));
  CHECK(has("problem.colour: unknown key"));
  CHECK(has("solver.k"));
  CHECK(has("unknown section [nowhere]"));
}

TEST_CASE("asymptotic mode needs its constants") {
  std::string text = kDuffing;
  text.replace(text.find("superquadratic"), 14, "asymptotic");
  text.replace(text.find("exponent = 4"), 12, "exponent = 1.5");
  CHECK_NOTHROW(parse_config(text));
  std::string bare = text;
  bare.replace(bare.find("builtin = power"), 15, "builtin = zero");
  const auto errs = errors_of(bare);
  CHECK(std::any_of(errs.begin(), errs.end(), [](const std::string& m) { return m.find("hypotheses.mu") != std::string::npos; }));
}

TEST_CASE("expression potentials and coefficient paths") {
  const RunConfig c = parse_config(R"(
[problem]
period = 2
dim = 2
nodes = 16
U = diagonal
U_diagonal = 1, 0.5 + cos(pi*t)
mode = superquadratic
[potential]
kind = expression
W = r^4/4
even = true
[hypotheses]
a1 = 1
nu = 4
varrho = 4
b = 0.5
[solver]
k = 8
start_radii = auto
[output]
formats = json
)");
  CHECK(c.problem.U_diagonal.size() == 2);
  CHECK(c.auto_radii);
  CHECK(c.output.json);
  CHECK_FALSE(c.output.csv);
  const auto U = c.coefficient_path();
  CHECK(U.at(0)(0, 0) == 1.0);
  CHECK(U.at(0)(1, 1) == doctest::Approx(1.5));
  CHECK(U.at(8)(1, 1) == doctest::Approx(-0.5));
  CHECK(c.build_potential().even);
}

TEST_CASE("bad expressions are configuration errors") {
  const auto errs = errors_of(kDuffing + "\n[hypotheses]\nnu = 4\n" + "varrho = 4\n" + "b = 0.5\na1 = (1\n");
  CHECK_FALSE(errs.empty());
}
