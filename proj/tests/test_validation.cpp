#include "fountain/fourier.hpp"
#include "fountain/validation.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace fountain;

namespace {
const double kT = 2.0 * std::numbers::pi;
const double kK = 1.8540746773013719;  // K(1/sqrt 2)
}  // namespace

TEST_CASE("elliptic constant") {
  double a = 1.0, b = std::sqrt(0.5);
  for (int i = 0; i < 30; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  CHECK(std::numbers::pi / (2.0 * a) == doctest::Approx(kK).epsilon(1e-15));
}

TEST_CASE("Duffing period by shooting") {
  const auto w = power_potential(0.25, 4.0, 1);
  for (double A : {0.5, 1.0, 3.0}) CHECK(shooting_period(w, 0.0, A) == doctest::Approx(4.0 * kK / A).epsilon(1e-10));
}

TEST_CASE("harmonic oscillator period does not depend on amplitude") {
  const auto w = zero_potential(1);
  CHECK(shooting_period(w, 4.0, 0.3) == doctest::Approx(std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("oracle amplitudes for the quartic") {
  const auto w = power_potential(0.25, 4.0, 1);
  const TimeGrid g(kT, 64, 1);
  for (int j = 1; j <= 3; ++j) {
    const auto o = oracle_shooting(w, 0.0, g, j);
    CHECK(o.amplitude == doctest::Approx(4.0 * kK * j / kT).epsilon(1e-11));
    CHECK(o.minimal_period == doctest::Approx(kT / j).epsilon(1e-11));
    CHECK(o.energy_drift < 1e-10);
    CHECK(o.trajectory(0, 0) == doctest::Approx(o.amplitude));
    CHECK(fourier::period_divisor(o.trajectory) == j);
  }
}

TEST_CASE("oracle for the three-halves power against the Beta function") {
  const auto w = power_potential(1.0, 1.5, 1);
  const double c = 4.0 / std::sqrt(2.0) * (2.0 / 3.0) * std::beta(2.0 / 3.0, 0.5);
  const TimeGrid g(kT, 64, 1);
  for (int j = 1; j <= 2; ++j)
    CHECK(oracle_shooting(w, 0.0, g, j).amplitude == doctest::Approx(std::pow(kT / (j * c), 4.0)).epsilon(1e-9));
}

TEST_CASE("oracle preconditions") {
  const TimeGrid g(kT, 16, 1);
  CHECK_THROWS_AS(oracle_shooting(power_potential(0.25, 4.0, 2), 0.0, TimeGrid(kT, 16, 2), 1), std::invalid_argument);
  CHECK_THROWS_AS(oracle_shooting(modulated_power_potential(1.0, 3.0, 1, kT), 0.0, g, 1), std::invalid_argument);
  CHECK_THROWS_AS(oracle_shooting(power_potential(0.25, 4.0, 1), 0.0, g, 0), std::invalid_argument);
}

TEST_CASE("alignment recovers shift and sign") {
  const TimeGrid g(kT, 64, 1);
  const auto u = GridFunction::sample(g, [](double t, std::span<double> out) { out[0] = std::cos(t) + 0.3 * std::sin(2 * t); });
  const auto v = -fourier::shifted(u, 1.1);
  const auto a = align(u, v);
  CHECK(a.sup < 1e-6);
  CHECK(a.sign == -1.0);
  CHECK(align(u, v, false).sup > 0.1);
}

TEST_CASE("residuals of the exact orbit") {
  const auto w = power_potential(0.25, 4.0, 1);
  const TimeGrid g(kT, 128, 1);
  const FunctionalContext ctx(g, MatrixPath::zero(g), w);
  const auto o = oracle_shooting(w, 0.0, g, 1);
  const auto r = strong_residual(ctx, o.trajectory);
  CHECK(r.sup < 1e-8);
  CHECK(r.periodicity_defect < 1e-8);
  CHECK(weak_residual(ctx, o.trajectory, 128) < 1e-8);
  CHECK(compare_to_oracle(fourier::shifted(o.trajectory, 0.4), o) < 1e-8);
  const auto off = 1.01 * o.trajectory;
  CHECK(strong_residual(ctx, off).sup > 1e-3);
}
