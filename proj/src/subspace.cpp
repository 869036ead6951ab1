#include "fountain/subspace.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace fountain {

std::vector<int> SubspaceSelector::indices(const SpectralDecomposition& dec) const {
  if (k < 1 || k > dec.size())
    throw std::invalid_argument("SubspaceSelector: k = " + std::to_string(k) +
                                " outside [1, " + std::to_string(dec.size()) + "]");
  std::vector<int> idx;
  if (kind == Kind::Y) {
    idx.resize(k);
    std::iota(idx.begin(), idx.end(), 0);
  } else {
    idx.resize(dec.size() - k + 1);
    std::iota(idx.begin(), idx.end(), k - 1);
  }
  return idx;
}

RestrictedFunctional::RestrictedFunctional(const FunctionalContext& ctx, std::vector<int> indices)
    : ctx_(ctx), indices_(std::move(indices)) {
  const auto& dec = ctx_.spectrum();
  const int m = size();
  basis_.resize(ctx_.grid().size(), m);
  w_.resize(m);
  eig_.resize(m);
  parts_.resize(m);
  for (int a = 0; a < m; ++a) {
    const int i = indices_[a];
    basis_.col(a) = dec.eigenvectors().col(i);
    w_[a] = dec.weights()[i];
    eig_[a] = dec.eigenvalue(i);
    parts_[a] = dec.part(i);
  }
}

GridFunction RestrictedFunctional::synthesize(const Eigen::VectorXd& c) const {
  return {ctx_.grid(), basis_ * c};
}

Eigen::VectorXd RestrictedFunctional::coordinates(const GridFunction& u) const {
  require_same_grid(u.grid(), ctx_.grid(), "RestrictedFunctional::coordinates");
  return ctx_.grid().weight() * (basis_.transpose() * u.values());
}

Eigen::VectorXd RestrictedFunctional::quadratic_diag(double lambda) const {
  Eigen::VectorXd s(size());
  for (int a = 0; a < size(); ++a) {
    switch (parts_[a]) {
      case SpectralPart::plus: s[a] = eig_[a]; break;
      case SpectralPart::minus: s[a] = lambda * eig_[a]; break;
      case SpectralPart::zero: s[a] = 0.0; break;
    }
  }
  return s;
}

double RestrictedFunctional::value(const Eigen::VectorXd& c, double lambda) const {
  double plus = 0.0;
  double minus = 0.0;
  for (int a = 0; a < size(); ++a) {
    if (parts_[a] == SpectralPart::plus) plus += w_[a] * c[a] * c[a];
    else if (parts_[a] == SpectralPart::minus) minus += w_[a] * c[a] * c[a];
  }
  return 0.5 * plus - lambda * (0.5 * minus + psi(ctx_, synthesize(c)));
}

Eigen::VectorXd RestrictedFunctional::dual(const Eigen::VectorXd& c, double lambda) const {
  const GridFunction g = potential_gradient(ctx_, synthesize(c));
  const Eigen::VectorXd gc = ctx_.grid().weight() * (basis_.transpose() * g.values());
  return quadratic_diag(lambda).cwiseProduct(c) - lambda * gc;
}

Eigen::MatrixXd RestrictedFunctional::hessian(const Eigen::VectorXd& c, double lambda) const {
  const int m = size();
  const auto& w = ctx_.potential();
  Eigen::MatrixXd H;
  if (w.has_hessian()) {
    const GridFunction u = synthesize(c);
    const int N = ctx_.grid().dim();
    Eigen::MatrixXd HB(basis_.rows(), m);
    for (int j = 0; j < ctx_.grid().nodes(); ++j) {
      const Eigen::MatrixXd h = w.hess(ctx_.grid().node(j), u.at(j));
      if (!h.allFinite()) throw NonFiniteEvaluation("Hessian of W", j);
      HB.middleRows(j * N, N) = h * basis_.middleRows(j * N, N);
    }
    H = -lambda * ctx_.grid().weight() * (basis_.transpose() * HB);
    H.diagonal() += quadratic_diag(lambda);
  } else {
    const double h = 1e-6 * (1.0 + e_norm(c));
    H.resize(m, m);
    Eigen::VectorXd x = c;
    for (int a = 0; a < m; ++a) {
      x[a] = c[a] + h;
      const Eigen::VectorXd dp = dual(x, lambda);
      x[a] = c[a] - h;
      const Eigen::VectorXd dm = dual(x, lambda);
      x[a] = c[a];
      H.col(a) = (dp - dm) / (2.0 * h);
    }
  }
  return 0.5 * (H + H.transpose());
}

double RestrictedFunctional::e_norm(const Eigen::VectorXd& c) const {
  return std::sqrt((w_.array() * c.array().square()).sum());
}

double RestrictedFunctional::dual_norm(const Eigen::VectorXd& d) const {
  return std::sqrt((d.array().square() / w_.array()).sum());
}

}  // namespace fountain
