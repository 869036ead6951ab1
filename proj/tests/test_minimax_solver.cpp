#include "fountain/fourier.hpp"
#include "fountain/minimax_solver.hpp"
#include "fountain/validation.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fountain;

namespace {
const double kT = 2.0 * std::numbers::pi;

FunctionalContext duffing(int nodes) {
  const TimeGrid g(kT, nodes, 1);
  return FunctionalContext(g, MatrixPath::zero(g), power_potential(0.25, 4.0, 1));
}

SolverConfig quick() {
  SolverConfig c;
  c.start_radii = {1.0, 3.0, 10.0};
  c.starts = 4;
  return c;
}
}  // namespace

TEST_CASE("solver configuration validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.k = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.lambda_schedule = {2.0, 1.5};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.lambda_schedule = {1.5, 2.0, 1.0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.start_radii = {1.0, -1.0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("Newton from cos t finds the first Duffing orbit") {
  const auto ctx = duffing(64);
  const auto u0 = GridFunction::sample(ctx.grid(), [](double t, std::span<double> out) { out[0] = 1.2 * std::cos(t); });
  const auto cp = find_critical(ctx, u0, 1.0, 64, quick());
  CHECK(cp.grad_norm <= 1e-10);
  CHECK(fourier::period_divisor(cp.u) == 1);
  CHECK(fourier::interpolated_sup(cp.u) == doctest::Approx(4.0 * std::comp_ellint_1(std::sqrt(0.5)) / kT).epsilon(1e-8));
  CHECK(cp.value > 0.0);
  CHECK_FALSE(cp.trivial);
  CHECK(strong_residual(ctx, cp.u).sup < 1e-8);
}

TEST_CASE("origin is trivial") {
  const auto ctx = duffing(32);
  const auto cp = find_critical(ctx, GridFunction(ctx.grid()), 1.0, 8, quick());
  CHECK(cp.trivial);
  CHECK(cp.value == 0.0);
}

TEST_CASE("multistart is deterministic and returns pairs once") {
  const auto ctx = duffing(32);
  const auto a = multistart_collect(ctx, 1.0, 8, quick());
  const auto b = multistart_collect(ctx, 1.0, 8, quick());
  REQUIRE(a.points.size() == b.points.size());
  CHECK(a.points.size() >= 3);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].value == b.points[i].value);
    CHECK((a.points[i].u.values() - b.points[i].u.values()).norm() == 0.0);
    for (std::size_t j = 0; j < i; ++j) CHECK(pair_distance(ctx, a.points[i].u, a.points[j].u) > 1e-4);
    if (i > 0) CHECK(a.points[i].value >= a.points[i - 1].value);
  }
}

TEST_CASE("pair distance ignores sign and time shift") {
  const auto ctx = duffing(32);
  const auto u = GridFunction::sample(ctx.grid(), [](double t, std::span<double> out) { out[0] = std::cos(t) + 0.2 * std::cos(3 * t); });
  CHECK(pair_distance(ctx, u, -u) < 1e-12);
  CHECK(pair_distance(ctx, u, fourier::shifted(u, 0.7)) < 1e-6);
  CHECK(pair_distance(ctx, u, 2.0 * u) > 0.1);
}

TEST_CASE("continuation from lambda 2 reaches lambda 1") {
  const auto ctx = duffing(32);
  auto cfg = quick();
  const auto head = multistart_collect(ctx, 2.0, 8, cfg);
  REQUIRE_FALSE(head.points.empty());
  const auto br = continue_branch(ctx, head.points.front(), cfg);
  CHECK(br.status == BranchStatus::converged);
  CHECK(br.points.front().lambda == 2.0);
  CHECK(br.points.back().lambda == 1.0);
  CHECK(br.points.size() == cfg.lambda_schedule.size());
  CHECK(value_in_bracket(br, br.points.back().value - 1.0, br.points.back().value + 1.0));
  CHECK_FALSE(value_in_bracket(br, br.points.back().value + 1.0, br.points.back().value + 2.0));
  CHECK(boundedness_diagnostics(br, GrowthMode::superquadratic, ctx.potential().constants).passed);
}

TEST_CASE("boundedness fit on synthetic norms") {
  HypothesisConstants k;
  k.mu = 1.5;
  CHECK(boundedness_diagnostics(std::vector<double>{1.0, 1.1, 1.15, 1.18, 1.2}, GrowthMode::asymptotic, k).passed);
  CHECK_FALSE(boundedness_diagnostics(std::vector<double>{1.0, 2.0, 4.0, 8.0, 100.0}, GrowthMode::asymptotic, k).passed);
}

TEST_CASE("refinement lifts a point to a finer grid") {
  const auto coarse = duffing(32);
  const auto fine = duffing(64);
  const auto u0 = GridFunction::sample(coarse.grid(), [](double t, std::span<double> out) { out[0] = 1.2 * std::cos(t); });
  const auto cp = find_critical(coarse, u0, 1.0, 12, quick());
  const auto r = refine_level(fine, cp, 64, quick());
  CHECK(r.point.u.grid().nodes() == 64);
  CHECK(r.point.grad_norm <= 1e-9);
  CHECK(r.increment < 1e-2);
  CHECK(strong_residual(fine, r.point.u).sup < 1e-8);
}
