#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace fountain {

/// User-declared constants of the growth hypotheses. Every field is optional;
/// audits and geometry only consume what they need.
struct HypothesisConstants {
  // asymptotically quadratic
  std::optional<double> mu, R1, c2, R2, d;
  // superquadratic
  std::optional<double> a1, nu, varrho, b;
  // derived: W <= c1 (1 + |u|^mu) and W <= a1 (|u| + |u|^nu) + a2
  std::optional<double> c1, a2;
};

/// W(t, u) with its gradient and optional Hessian. All callables take the
/// point u in R^N; the gradient writes N entries and the Hessian N*N entries
/// in row-major order.
struct Potential {
  using Value = std::function<double(double, std::span<const double>)>;
  using Gradient = std::function<void(double, std::span<const double>, std::span<double>)>;
  using Hessian = std::function<void(double, std::span<const double>, std::span<double>)>;

  std::string name;
  int dim = 1;
  Value value;
  Gradient gradient;
  Hessian hessian;  // may be empty
  bool even = false;
  bool autonomous = false;
  HypothesisConstants constants;

  double W(double t, std::span<const double> u) const { return value(t, u); }
  Eigen::VectorXd grad(double t, std::span<const double> u) const;
  bool has_hessian() const { return static_cast<bool>(hessian); }
  Eigen::MatrixXd hess(double t, std::span<const double> u) const;
};

/// W = c|u|^p. Constants are pre-declared for the class the exponent falls
/// in: p in (1,2) gets (mu, R1, c2, R2, d) = (p, 1, c, 1, c); p > 2 gets
/// (a1, nu, varrho, b) = (c p, p, p, c (p - 2)).
Potential power_potential(double coefficient, double exponent, int dim);

/// W = a(t) c |u|^p with a(t) = 1 + cos(2 pi t / T) / 2.
Potential modulated_power_potential(double coefficient, double exponent, int dim, double period);

/// W = 0.
Potential zero_potential(int dim);

/// Central-difference gradient of `value`, step 1e-6 (1 + |u|) per axis.
Potential::Gradient finite_difference_gradient(Potential::Value value, int dim);

}  // namespace fountain
