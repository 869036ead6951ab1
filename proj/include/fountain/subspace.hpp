#pragma once

#include "fountain/action_functional.hpp"

#include <vector>

namespace fountain {

/// Y_k = span{e_1..e_k} or Z_k = closure span{e_k, e_{k+1}, ...}; k is 1-based.
struct SubspaceSelector {
  enum class Kind { Y, Z };
  Kind kind;
  int k;

  static SubspaceSelector Y(int k) { return {Kind::Y, k}; }
  static SubspaceSelector Z(int k) { return {Kind::Z, k}; }

  /// 0-based eigen-indices; throws when k is outside [1, MN].
  std::vector<int> indices(const SpectralDecomposition& dec) const;
};

/// Phi_lambda restricted to span{e_i : i in indices}, in eigen-coordinates
/// c_i = (u, e_i)_2. The E inner product is diagonal there with weights w_i.
class RestrictedFunctional {
 public:
  RestrictedFunctional(const FunctionalContext& ctx, std::vector<int> indices);
  RestrictedFunctional(const FunctionalContext& ctx, const SubspaceSelector& sel)
      : RestrictedFunctional(ctx, sel.indices(ctx.spectrum())) {}

  const FunctionalContext& context() const { return ctx_; }
  const std::vector<int>& indices() const { return indices_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const Eigen::VectorXd& weights() const { return w_; }
  /// L2-normalized basis vectors as columns.
  const Eigen::MatrixXd& basis() const { return basis_; }

  GridFunction synthesize(const Eigen::VectorXd& c) const;
  /// Orthogonal projection coordinates (u, e_i)_2.
  Eigen::VectorXd coordinates(const GridFunction& u) const;

  double value(const Eigen::VectorXd& c, double lambda) const;
  /// d_i = Phi_lambda'(u) e_i.
  Eigen::VectorXd dual(const Eigen::VectorXd& c, double lambda) const;
  /// d^2 Phi_lambda(u)[e_i, e_j]; analytic when W has a Hessian, otherwise
  /// symmetric central differences of `dual` with h = 1e-6 (1 + |u|).
  Eigen::MatrixXd hessian(const Eigen::VectorXd& c, double lambda) const;

  double e_norm(const Eigen::VectorXd& c) const;
  /// Norm of Phi' restricted to the subspace, in the dual of the E norm.
  double dual_norm(const Eigen::VectorXd& d) const;

 private:
  Eigen::VectorXd quadratic_diag(double lambda) const;

  FunctionalContext ctx_;
  std::vector<int> indices_;
  Eigen::MatrixXd basis_;
  Eigen::VectorXd w_;
  Eigen::VectorXd eig_;
  std::vector<SpectralPart> parts_;
};

}  // namespace fountain
