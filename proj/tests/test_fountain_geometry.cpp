#include "fountain/fountain_geometry.hpp"
#include "fountain/sphere_optimizer.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace fountain;

namespace {
const double kT = 2.0 * std::numbers::pi;
}

TEST_CASE("sup norm constant of the first three Fourier modes") {
  const TimeGrid g(kT, 32, 1);
  const auto dec = eigendecompose(assemble_operator(g, MatrixPath::zero(g)), g);
  CHECK(sup_norm_constant(dec, {0, 1, 2}) == doctest::Approx(std::sqrt(1.0 / kT + 1.0 / std::numbers::pi)));
}

TEST_CASE("certified L1 bound on the tail") {
  const TimeGrid g(kT, 32, 1);
  const auto dec = eigendecompose(assemble_operator(g, MatrixPath::zero(g)), g);
  for (int k : {2, 5, 9})
    CHECK(certified_lp_bound(dec, SubspaceSelector::Z(k), 1.0) ==
          doctest::Approx(std::sqrt(kT) / std::sqrt(dec.weights()[k - 1])));
}

TEST_CASE("radius formulas") {
  CHECK(rho_aq(0.5, 2.0) == doctest::Approx(8.0));
  CHECK(rho_aq(0.5, 2.0, 4.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(rho_aq(0.0, 1.0), std::invalid_argument);
  CHECK(rho_sq(0.5, 1.0, 4.0) == doctest::Approx(std::pow(16.0 * std::pow(0.5, 4.0), -0.5)));
  CHECK_THROWS_AS(rho_sq(0.5, 1.0, 2.0), std::invalid_argument);
  CHECK(rho_sq_floor(1.0, 0.5, 0.0, kT) == doctest::Approx(9.0));
}

TEST_CASE("sphere optimizer on a quadratic form") {
  const Eigen::Vector3d d(1.0, 3.0, -2.0);
  Objective f;
  f.value = [&](const Eigen::VectorXd& x) { return x.dot(d.asDiagonal() * x); };
  f.gradient = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return 2.0 * (d.asDiagonal() * x); };
  SphereOptions o;
  o.starts = 8;
  const auto mx = optimize_on_sphere(f, 3, 2.0, Sense::maximize, o);
  CHECK(mx.value == doctest::Approx(12.0).epsilon(1e-8));
  CHECK(mx.point.norm() == doctest::Approx(2.0));
  const auto mn = optimize_on_sphere(f, 3, 2.0, Sense::minimize, o);
  CHECK(mn.value == doctest::Approx(-8.0).epsilon(1e-8));
  o.domain = Domain::ball;
  const auto ball = optimize_on_sphere(f, 3, 2.0, Sense::minimize, o);
  CHECK(ball.value == doctest::Approx(-8.0).epsilon(1e-8));
}

TEST_CASE("convex ascent on a sphere") {
  const Eigen::Vector2d c(3.0, 4.0);
  Objective f;
  f.value = [&](const Eigen::VectorXd& x) { return std::abs(c.dot(x)); };
  f.gradient = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return (c.dot(x) >= 0 ? 1.0 : -1.0) * c; };
  SphereOptions o;
  o.starts = 4;
  CHECK(maximize_convex_on_sphere(f, 2, 1.5, o).value == doctest::Approx(7.5));
}

TEST_CASE("small asymptotic geometry table") {
  const TimeGrid g(kT, 32, 1);
  const FunctionalContext ctx(g, MatrixPath::zero(g), power_potential(1.0, 1.5, 1));
  GeometryOptions opt;
  opt.starts = 16;
  const auto tab = geometry_table(ctx, 2, 5, {1.0, 2.0}, GrowthMode::asymptotic, opt);
  REQUIRE(tab.size() == 8);
  for (std::size_t i = 0; i < tab.size(); ++i) {
    CHECK(tab[i].k == 2 + static_cast<int>(i / 2));
    CHECK(tab[i].lambda == (i % 2 == 0 ? 1.0 : 2.0));
    CHECK(tab[i].flags.at("ell_cert_ok"));
    CHECK(tab[i].rho == doctest::Approx(8.0 * tab[i].ell_cert));
    CHECK(tab[i].beta_hat < 0.0);
  }
  CHECK_THROWS_AS(geometry_table(ctx, 1, 3, {1.0}, GrowthMode::asymptotic, opt), std::invalid_argument);
  std::ostringstream os;
  write_geometry_csv(os, tab);
  CHECK(os.str().rfind("k,lambda", 0) == 0);
}

TEST_CASE("first stable level") {
  std::vector<GeometryReport> t(4);
  const bool flags[4] = {false, true, false, true};
  for (int i = 0; i < 4; ++i) {
    t[i].k = i + 1;
    t[i].flags["x"] = flags[i];
  }
  CHECK(first_stable_level(t, "x") == 4);
  t[2].flags["x"] = true;
  CHECK(first_stable_level(t, "x") == 2);
  t[3].flags["x"] = false;
  CHECK(first_stable_level(t, "x") == 0);
}
