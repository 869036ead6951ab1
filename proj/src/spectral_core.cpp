#include "fountain/spectral_core.hpp"

#include "fountain/format.hpp"
#include "fountain/fourier.hpp"

#include <Eigen/Eigenvalues>

#include <charconv>
#include <cmath>
#include <limits>

namespace fountain {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

NonSymmetricSample::NonSymmetricSample(int node, double asymmetry)
    : std::invalid_argument("U(t_j) is not symmetric at node " + std::to_string(node) +
                            " (max |U - U^T| = " + format_double(asymmetry) + ")"),
      node_(node),
      asymmetry_(asymmetry) {}

const char* to_string(SpectralPart p) {
  switch (p) {
    case SpectralPart::minus: return "minus";
    case SpectralPart::zero: return "zero";
    case SpectralPart::plus: return "plus";
  }
  return "?";
}

SpectralDecomposition::SpectralDecomposition(const TimeGrid& grid, Eigen::VectorXd eigenvalues,
                                             Eigen::MatrixXd eigenvectors, double zero_tol)
    : grid_(grid),
      eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      zero_tol_(zero_tol),
      weights_(eigenvalues_.size()) {
  if (!(zero_tol > 0.0)) throw std::invalid_argument("zero_tol must be positive");
  for (int i = 0; i < size(); ++i) {
    const double l = eigenvalues_[i];
    if (l < -zero_tol_) ++n_minus_;
    else if (l <= zero_tol_) ++n_zero_;
    weights_[i] = std::abs(l) > zero_tol_ ? std::abs(l) : 1.0;
  }
}

SpectralPart SpectralDecomposition::part(int i) const {
  if (i < n_minus_) return SpectralPart::minus;
  if (i < n_minus_ + n_zero_) return SpectralPart::zero;
  return SpectralPart::plus;
}

Eigen::VectorXd SpectralDecomposition::coefficients(const GridFunction& u) const {
  require_same_grid(u.grid(), grid_, "coefficients");
  return grid_.weight() * (eigenvectors_.transpose() * u.values());
}

GridFunction SpectralDecomposition::synthesize(const Eigen::VectorXd& c) const {
  return {grid_, eigenvectors_ * c};
}

Eigen::MatrixXd assemble_operator(const TimeGrid& grid, const MatrixPath& U) {
  require_same_grid(grid, U.grid(), "assemble_operator");
  const int M = grid.nodes();
  const int N = grid.dim();
  for (int j = 0; j < M; ++j) {
    const Eigen::MatrixXd& s = U.at(j);
    const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if (asym > 1e-12 * scale) throw NonSymmetricSample(j, asym);
  }
  const Eigen::MatrixXd D = fourier::neg_second_derivative_matrix(grid.period(), M);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M * N, M * N);
  for (int j = 0; j < M; ++j)
    for (int l = 0; l < M; ++l)
      for (int n = 0; n < N; ++n) A(j * N + n, l * N + n) = D(j, l);
  for (int j = 0; j < M; ++j) {
    const Eigen::MatrixXd s = 0.5 * (U.at(j) + U.at(j).transpose());
    A.block(j * N, j * N, N, N) -= s;
  }
  return A;
}

double default_zero_tol(const Eigen::VectorXd& eigenvalues) {
  const double m = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  return 1e-8 * std::max(1.0, m);
}

SpectralDecomposition eigendecompose(const Eigen::MatrixXd& op, const TimeGrid& grid,
                                     std::optional<double> zero_tol) {
  if (op.rows() != grid.size() || op.cols() != grid.size())
    throw std::invalid_argument("eigendecompose: operator size does not match grid");
  const double scale = std::max(1.0, op.cwiseAbs().maxCoeff());
  if ((op - op.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("eigendecompose: operator is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op);
  if (solver.info() != Eigen::Success) {
    throw EigenSolverFailure("eigendecompose: symmetric eigensolver did not converge",
                             std::numeric_limits<double>::quiet_NaN());
  }
  Eigen::MatrixXd V = solver.eigenvectors() / std::sqrt(grid.weight());
  const Eigen::VectorXd& ev = solver.eigenvalues();
  // Residual check in the scaled basis: |A e - lambda e|_2 relative to max(1, |lambda|).
  const Eigen::MatrixXd R = op * V - V * ev.asDiagonal();
  double worst = 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    const double r = std::sqrt(grid.weight()) * R.col(i).norm() / std::max(1.0, std::abs(ev[i]));
    worst = std::max(worst, r);
  }
  if (!(worst <= 1e-9)) {
    throw EigenSolverFailure("eigendecompose: eigenpair residual " + format_double(worst) +
                                 " exceeds 1e-9",
                             worst);
  }
  const double tol = zero_tol.value_or(default_zero_tol(ev));
  return {grid, ev, std::move(V), tol};
}

GridFunction project(const GridFunction& u, const SpectralDecomposition& dec, SpectralPart part) {
  Eigen::VectorXd c = dec.coefficients(u);
  for (int i = 0; i < dec.size(); ++i)
    if (dec.part(i) != part) c[i] = 0.0;
  return dec.synthesize(c);
}

double l2_inner(const GridFunction& u, const GridFunction& v) {
  require_same_grid(u.grid(), v.grid(), "l2_inner");
  return u.grid().weight() * u.values().dot(v.values());
}

double lp_norm(const GridFunction& u, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const int M = u.grid().nodes();
  if (std::isinf(p)) {
    double m = 0.0;
    for (int j = 0; j < M; ++j) {
      const auto x = u.at(j);
      m = std::max(m, Eigen::Map<const Eigen::VectorXd>(x.data(), x.size()).norm());
    }
    return m;
  }
  double s = 0.0;
  for (int j = 0; j < M; ++j) {
    const auto x = u.at(j);
    s += std::pow(Eigen::Map<const Eigen::VectorXd>(x.data(), x.size()).norm(), p);
  }
  return std::pow(u.grid().weight() * s, 1.0 / p);
}

double e_inner(const GridFunction& u, const GridFunction& v, const SpectralDecomposition& dec) {
  require_same_grid(u.grid(), v.grid(), "e_inner");
  const Eigen::VectorXd c = dec.coefficients(u);
  const Eigen::VectorXd d = dec.coefficients(v);
  return (dec.weights().array() * c.array() * d.array()).sum();
}

double e_norm(const GridFunction& u, const SpectralDecomposition& dec) {
  const Eigen::VectorXd c = dec.coefficients(u);
  return std::sqrt((dec.weights().array() * c.array().square()).sum());
}

void write_spectrum_csv(std::ostream& os, const SpectralDecomposition& dec) {
  os << "index,eigenvalue,classification\n";
  for (int i = 0; i < dec.size(); ++i)
    os << (i + 1) << ',' << format_double(dec.eigenvalue(i)) << ',' << to_string(dec.part(i))
       << '\n';
}

void write_eigenvectors_csv(std::ostream& os, const SpectralDecomposition& dec, int count) {
  const int M = dec.grid().nodes();
  const int N = dec.grid().dim();
  for (int i = 0; i < std::min(count, dec.size()); ++i) {
    os << "# e_" << (i + 1) << '\n';
    for (int j = 0; j < M; ++j) {
      for (int n = 0; n < N; ++n) {
        if (n) os << ',';
        os << format_double(dec.eigenvectors()(j * N + n, i));
      }
      os << '\n';
    }
  }
}

}  // namespace fountain
