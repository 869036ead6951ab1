#include "fountain/action_functional.hpp"

#include <cmath>

namespace fountain {

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 2.0 + 1e-12))
    throw std::invalid_argument("lambda must lie in (0, 2]");
}

}  // namespace

FunctionalContext::FunctionalContext(const TimeGrid& grid, const MatrixPath& U, Potential potential,
                                     std::optional<double> zero_tol)
    : grid_(grid),
      path_(std::make_shared<const MatrixPath>(U)),
      potential_(std::make_shared<const Potential>(std::move(potential))) {
  require_same_grid(grid, U.grid(), "FunctionalContext");
  if (potential_->dim != grid.dim())
    throw std::invalid_argument("FunctionalContext: potential dimension does not match grid");
  op_ = std::make_shared<const Eigen::MatrixXd>(assemble_operator(grid, U));
  spectrum_ = std::make_shared<const SpectralDecomposition>(eigendecompose(*op_, grid, zero_tol));
}

bool FunctionalContext::autonomous() const {
  return potential_->autonomous && path_->is_constant(0.0);
}

GridFunction potential_gradient(const FunctionalContext& ctx, const GridFunction& u) {
  require_same_grid(u.grid(), ctx.grid(), "potential_gradient");
  GridFunction g(ctx.grid());
  const auto& w = ctx.potential();
  for (int j = 0; j < ctx.grid().nodes(); ++j) {
    w.gradient(ctx.grid().node(j), u.at(j), g.at(j));
    for (double x : g.at(j))
      if (!std::isfinite(x)) throw NonFiniteEvaluation("grad W", j);
  }
  return g;
}

double psi(const FunctionalContext& ctx, const GridFunction& u) {
  require_same_grid(u.grid(), ctx.grid(), "psi");
  double s = 0.0;
  for (int j = 0; j < ctx.grid().nodes(); ++j) {
    const double w = ctx.potential().W(ctx.grid().node(j), u.at(j));
    if (!std::isfinite(w)) throw NonFiniteEvaluation("W", j);
    s += w;
  }
  return ctx.grid().weight() * s;
}

double a_part(const FunctionalContext& ctx, const GridFunction& u) {
  const auto& dec = ctx.spectrum();
  const Eigen::VectorXd c = dec.coefficients(u);
  double s = 0.0;
  for (int i = dec.n_bar(); i < dec.size(); ++i) s += dec.weights()[i] * c[i] * c[i];
  return 0.5 * s;
}

double b_part(const FunctionalContext& ctx, const GridFunction& u) {
  const auto& dec = ctx.spectrum();
  const Eigen::VectorXd c = dec.coefficients(u);
  double s = 0.0;
  for (int i = 0; i < dec.n_minus(); ++i) s += dec.weights()[i] * c[i] * c[i];
  return 0.5 * s + psi(ctx, u);
}

double phi_lambda(const FunctionalContext& ctx, const GridFunction& u, double lambda) {
  check_lambda(lambda);
  return a_part(ctx, u) - lambda * b_part(ctx, u);
}

double phi(const FunctionalContext& ctx, const GridFunction& u) { return phi_lambda(ctx, u, 1.0); }

GridFunction grad_phi_lambda(const FunctionalContext& ctx, const GridFunction& u, double lambda) {
  check_lambda(lambda);
  const auto& dec = ctx.spectrum();
  const Eigen::VectorXd c = dec.coefficients(u);
  const Eigen::VectorXd gc = dec.coefficients(potential_gradient(ctx, u));
  Eigen::VectorXd r(dec.size());
  for (int i = 0; i < dec.size(); ++i) {
    double quad = 0.0;
    switch (dec.part(i)) {
      case SpectralPart::plus: quad = c[i]; break;
      case SpectralPart::minus: quad = -lambda * c[i]; break;
      case SpectralPart::zero: break;
    }
    r[i] = quad - lambda * gc[i] / dec.weights()[i];
  }
  return dec.synthesize(r);
}

double phi_prime_apply(const FunctionalContext& ctx, const GridFunction& u, const GridFunction& v,
                       double lambda) {
  check_lambda(lambda);
  const GridFunction up = project(u, ctx.spectrum(), SpectralPart::plus);
  const GridFunction vp = project(v, ctx.spectrum(), SpectralPart::plus);
  const GridFunction um = project(u, ctx.spectrum(), SpectralPart::minus);
  const GridFunction vm = project(v, ctx.spectrum(), SpectralPart::minus);
  const GridFunction g = potential_gradient(ctx, u);
  return e_inner(up, vp, ctx.spectrum()) - lambda * e_inner(um, vm, ctx.spectrum()) -
         lambda * l2_inner(g, v);
}

bool lambda_outside_theory(double lambda) { return lambda < 1.0 || lambda > 2.0; }

}  // namespace fountain
