#pragma once

#include "fountain/potential.hpp"
#include "fountain/spectral_core.hpp"

#include <memory>
#include <stdexcept>
#include <string>

namespace fountain {

/// W or its gradient evaluated to a non-finite number at a node.
class NonFiniteEvaluation : public std::domain_error {
 public:
  NonFiniteEvaluation(const std::string& what, int node)
      : std::domain_error(what + " is not finite at node " + std::to_string(node)), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

/// Grid, coefficient path, its spectrum and the potential. Immutable and
/// cheap to copy; the heavy members are shared.
class FunctionalContext {
 public:
  FunctionalContext(const TimeGrid& grid, const MatrixPath& U, Potential potential,
                    std::optional<double> zero_tol = std::nullopt);

  const TimeGrid& grid() const { return grid_; }
  const MatrixPath& path() const { return *path_; }
  const Potential& potential() const { return *potential_; }
  const SpectralDecomposition& spectrum() const { return *spectrum_; }
  /// The assembled operator A = -d^2/dt^2 - U(t).
  const Eigen::MatrixXd& op() const { return *op_; }

  /// Constant U and time-independent W: the problem is shift equivariant.
  bool autonomous() const;

 private:
  TimeGrid grid_;
  std::shared_ptr<const MatrixPath> path_;
  std::shared_ptr<const Potential> potential_;
  std::shared_ptr<const Eigen::MatrixXd> op_;
  std::shared_ptr<const SpectralDecomposition> spectrum_;
};

/// Node values g_j = grad W(t_j, u_j), checked for finiteness.
GridFunction potential_gradient(const FunctionalContext& ctx, const GridFunction& u);

/// Psi(u) = int_0^T W(t, u) dt by the periodic rectangle rule.
double psi(const FunctionalContext& ctx, const GridFunction& u);

/// A(u) = |u^+|^2 / 2.
double a_part(const FunctionalContext& ctx, const GridFunction& u);
/// B(u) = |u^-|^2 / 2 + Psi(u).
double b_part(const FunctionalContext& ctx, const GridFunction& u);

/// Phi_lambda = A - lambda B.
double phi_lambda(const FunctionalContext& ctx, const GridFunction& u, double lambda);
double phi(const FunctionalContext& ctx, const GridFunction& u);

/// E-Riesz representative of Phi_lambda'(u).
GridFunction grad_phi_lambda(const FunctionalContext& ctx, const GridFunction& u, double lambda);

/// Phi_lambda'(u) v = (u+, v+) - lambda (u-, v-) - lambda int <grad W(t,u), v> dt.
double phi_prime_apply(const FunctionalContext& ctx, const GridFunction& u, const GridFunction& v,
                       double lambda);

/// True when lambda lies outside [1, 2], the range the theory covers.
bool lambda_outside_theory(double lambda);

}  // namespace fountain
