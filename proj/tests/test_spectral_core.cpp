#include "fountain/spectral_core.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace fountain;

namespace {
const double kT = 2.0 * std::numbers::pi;
}

TEST_CASE("free operator has eigenvalues n^2 with double multiplicity") {
  const TimeGrid g(kT, 64, 1);
  const auto dec = eigendecompose(assemble_operator(g, MatrixPath::zero(g)), g);
  CHECK(dec.size() == 64);
  CHECK(dec.eigenvalue(0) == doctest::Approx(0.0).epsilon(1e-12));
  for (int n = 1; n <= 10; ++n) {
    CHECK(std::abs(dec.eigenvalue(2 * n - 1) - n * n) < 1e-10);
    CHECK(std::abs(dec.eigenvalue(2 * n) - n * n) < 1e-10);
  }
  CHECK(dec.n_minus() == 0);
  CHECK(dec.n_zero() == 1);
  CHECK(dec.n_bar() == 1);
  CHECK(dec.weights()[0] == 1.0);
  CHECK(dec.weights()[5] == doctest::Approx(9.0));
}

TEST_CASE("constant potential shifts the spectrum") {
  const TimeGrid g(kT, 32, 1);
  const auto dec = eigendecompose(assemble_operator(g, MatrixPath::constant(g, 1.0)), g);
  CHECK(dec.eigenvalue(0) == doctest::Approx(-1.0));
  CHECK(std::abs(dec.eigenvalue(1)) < 1e-10);
  CHECK(std::abs(dec.eigenvalue(2)) < 1e-10);
  CHECK(dec.n_minus() == 1);
  CHECK(dec.n_zero() == 2);
  CHECK(dec.part(0) == SpectralPart::minus);
  CHECK(dec.part(1) == SpectralPart::zero);
  CHECK(dec.part(3) == SpectralPart::plus);
  CHECK(dec.weights()[0] == doctest::Approx(1.0));
  CHECK(dec.weights()[1] == 1.0);
}

TEST_CASE("diagonal system splits into scalar spectra") {
  const TimeGrid g(kT, 16, 2);
  const auto U = MatrixPath::sample(g, [](double) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 0) = 0.25;
    m(1, 1) = 2.25;
    return m;
  });
  const auto dec = eigendecompose(assemble_operator(g, U), g);
  CHECK(dec.size() == 32);
  CHECK(dec.eigenvalue(0) == doctest::Approx(-2.25));
  CHECK(dec.eigenvalue(1) == doctest::Approx(-1.25));
  CHECK(dec.eigenvalue(2) == doctest::Approx(-1.25));
  CHECK(dec.eigenvalue(3) == doctest::Approx(-0.25));
  CHECK(dec.n_minus() == 4);
}

TEST_CASE("non-symmetric coefficient samples are rejected") {
  const TimeGrid g(kT, 8, 2);
  const auto U = MatrixPath::sample(g, [](double) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
  });
  CHECK_THROWS_AS(assemble_operator(g, U), NonSymmetricSample);
}

TEST_CASE("eigenfunctions are orthonormal and projections recombine") {
  const TimeGrid g(kT, 24, 1);
  const auto dec = eigendecompose(assemble_operator(g, MatrixPath::constant(g, 2.0)), g);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(l2_inner(dec.eigenfunction(i), dec.eigenfunction(j)) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
  const auto u = GridFunction::sample(g, [](double t, std::span<double> out) { out[0] = 1.0 + std::sin(3 * t) + std::cos(t); });
  const auto sum = project(u, dec, SpectralPart::minus) + project(u, dec, SpectralPart::zero) +
                   project(u, dec, SpectralPart::plus);
  CHECK((sum.values() - u.values()).norm() < 1e-12);
  const Eigen::VectorXd c = dec.coefficients(u);
  CHECK((dec.synthesize(c).values() - u.values()).norm() < 1e-12);
  double e2 = 0.0;
  for (int i = 0; i < dec.size(); ++i) e2 += dec.weights()[i] * c[i] * c[i];
  CHECK(e_norm(u, dec) == doctest::Approx(std::sqrt(e2)));
}

TEST_CASE("spectrum csv is fixed-format") {
  const TimeGrid g(kT, 8, 1);
  const auto dec = eigendecompose(assemble_operator(g, MatrixPath::constant(g, 1.0)), g);
  std::ostringstream os;
  write_spectrum_csv(os, dec);
  std::istringstream is(os.str());
  std::string header, first;
  std::getline(is, header);
  std::getline(is, first);
  CHECK(header == "index,eigenvalue,classification");
  CHECK(first.rfind("1,-", 0) == 0);
  CHECK(first.find("minus") != std::string::npos);
}
