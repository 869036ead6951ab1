#include "fountain/potential.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fountain {

namespace {

double norm_of(std::span<const double> u) {
  double s = 0.0;
  for (double x : u) s += x * x;
  return std::sqrt(s);
}

// Smallest radius used when evaluating Hessians of |u|^p with p < 2, which
// are unbounded at the origin.
constexpr double kHessianFloor = 1e-12;

void declare_constants(Potential& w, double c_low, double c_high, double p) {
  auto& k = w.constants;
  if (p > 1.0 && p < 2.0) {
    k.mu = p;
    k.R1 = 1.0;
    k.c2 = c_high;
    k.R2 = 1.0;
    k.d = c_low;
  } else if (p > 2.0) {
    k.a1 = c_high * p;
    k.nu = p;
    k.varrho = p;
    k.b = c_low * (p - 2.0);
  }
}

}  // namespace

Eigen::VectorXd Potential::grad(double t, std::span<const double> u) const {
  Eigen::VectorXd g(dim);
  gradient(t, u, {g.data(), static_cast<std::size_t>(dim)});
  return g;
}

Eigen::MatrixXd Potential::hess(double t, std::span<const double> u) const {
  if (!hessian) throw std::logic_error("Potential '" + name + "' has no Hessian");
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> h(dim, dim);
  hessian(t, u, {h.data(), static_cast<std::size_t>(dim) * dim});
  return h;
}

Potential power_potential(double coefficient, double exponent, int dim) {
  if (!(exponent > 1.0)) throw std::invalid_argument("power_potential: exponent must exceed 1");
  const double c = coefficient;
  const double p = exponent;
  Potential w;
  w.name = "power";
  w.dim = dim;
  w.even = true;
  w.autonomous = true;
  w.value = [c, p](double, std::span<const double> u) { return c * std::pow(norm_of(u), p); };
  w.gradient = [c, p](double, std::span<const double> u, std::span<double> g) {
    const double r = norm_of(u);
    const double f = r > 0.0 ? c * p * std::pow(r, p - 2.0) : 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) g[i] = f * u[i];
  };
  w.hessian = [c, p](double, std::span<const double> u, std::span<double> h) {
    const std::size_t n = u.size();
    double r = norm_of(u);
    if (p < 2.0) r = std::max(r, kHessianFloor);
    const double a = r > 0.0 ? c * p * std::pow(r, p - 2.0) : (p == 2.0 ? 2.0 * c : 0.0);
    const double b = r > 0.0 ? c * p * (p - 2.0) * std::pow(r, p - 4.0) : 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) h[i * n + j] = (i == j ? a : 0.0) + b * u[i] * u[j];
  };
  declare_constants(w, c, c, p);
  return w;
}

Potential modulated_power_potential(double coefficient, double exponent, int dim, double period) {
  Potential base = power_potential(coefficient, exponent, dim);
  const auto a = [period](double t) { return 1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * t / period); };
  Potential w;
  w.name = "modulated_power";
  w.dim = dim;
  w.even = true;
  w.autonomous = false;
  w.value = [a, f = base.value](double t, std::span<const double> u) { return a(t) * f(t, u); };
  w.gradient = [a, f = base.gradient](double t, std::span<const double> u, std::span<double> g) {
    f(t, u, g);
    for (double& x : g) x *= a(t);
  };
  w.hessian = [a, f = base.hessian](double t, std::span<const double> u, std::span<double> h) {
    f(t, u, h);
    for (double& x : h) x *= a(t);
  };
  declare_constants(w, 0.5 * coefficient, 1.5 * coefficient, exponent);
  return w;
}

Potential zero_potential(int dim) {
  Potential w;
  w.name = "zero";
  w.dim = dim;
  w.even = true;
  w.autonomous = true;
  w.value = [](double, std::span<const double>) { return 0.0; };
  w.gradient = [](double, std::span<const double>, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
  };
  w.hessian = [](double, std::span<const double>, std::span<double> h) {
    std::fill(h.begin(), h.end(), 0.0);
  };
  return w;
}

Potential::Gradient finite_difference_gradient(Potential::Value value, int dim) {
  return [value = std::move(value), dim](double t, std::span<const double> u, std::span<double> g) {
    std::vector<double> x(u.begin(), u.end());
    const double h = 1e-6 * (1.0 + norm_of(u));
    for (int i = 0; i < dim; ++i) {
      const double xi = x[i];
      x[i] = xi + h;
      const double fp = value(t, x);
      x[i] = xi - h;
      const double fm = value(t, x);
      x[i] = xi;
      g[i] = (fp - fm) / (2.0 * h);
    }
  };
}

}  // namespace fountain
