#pragma once

#include "fountain/time_grid.hpp"

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fountain {

/// Thrown when U(t_j) is not symmetric; carries the offending node.
class NonSymmetricSample : public std::invalid_argument {
 public:
  NonSymmetricSample(int node, double asymmetry);
  int node() const { return node_; }
  double asymmetry() const { return asymmetry_; }

 private:
  int node_;
  double asymmetry_;
};

/// Thrown when the dense symmetric eigensolver fails to converge.
class EigenSolverFailure : public std::runtime_error {
 public:
  EigenSolverFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

enum class SpectralPart { minus, zero, plus };

const char* to_string(SpectralPart p);

/// Eigenpairs of A = -d^2/dt^2 - U(t) with L2-orthonormal eigenvectors
/// (discrete product (u,v)_2 = (T/M) sum_j u_j . v_j), ascending eigenvalues,
/// and the weights of the E inner product.
class SpectralDecomposition {
 public:
  SpectralDecomposition(const TimeGrid& grid, Eigen::VectorXd eigenvalues,
                        Eigen::MatrixXd eigenvectors, double zero_tol);

  const TimeGrid& grid() const { return grid_; }
  int size() const { return static_cast<int>(eigenvalues_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(int i) const { return eigenvalues_[i]; }
  /// Columns are e_1..e_{MN} (0-based here), flattened node-major.
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  GridFunction eigenfunction(int i) const { return {grid_, eigenvectors_.col(i)}; }
  double zero_tol() const { return zero_tol_; }

  int n_minus() const { return n_minus_; }
  int n_zero() const { return n_zero_; }
  int n_plus() const { return size() - n_minus_ - n_zero_; }
  /// n-bar = n^- + n^0.
  int n_bar() const { return n_minus_ + n_zero_; }

  SpectralPart part(int i) const;
  /// |lambda_i| off the kernel, 1 on it.
  const Eigen::VectorXd& weights() const { return weights_; }

  /// c_i = (u, e_i)_2 for all i.
  Eigen::VectorXd coefficients(const GridFunction& u) const;
  GridFunction synthesize(const Eigen::VectorXd& coefficients) const;

 private:
  TimeGrid grid_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  double zero_tol_;
  int n_minus_ = 0;
  int n_zero_ = 0;
  Eigen::VectorXd weights_;
};

/// D (x) I_N - blockdiag(U(t_j)), D the Fourier matrix of -d^2/dt^2.
Eigen::MatrixXd assemble_operator(const TimeGrid& grid, const MatrixPath& U);

/// Default kernel threshold 1e-8 * max(1, |lambda|_max).
double default_zero_tol(const Eigen::VectorXd& eigenvalues);

/// Full dense eigendecomposition. zero_tol defaults per default_zero_tol.
SpectralDecomposition eigendecompose(const Eigen::MatrixXd& op, const TimeGrid& grid,
                                     std::optional<double> zero_tol = std::nullopt);

GridFunction project(const GridFunction& u, const SpectralDecomposition& dec, SpectralPart part);

double l2_inner(const GridFunction& u, const GridFunction& v);
double lp_norm(const GridFunction& u, double p);

/// (|A|^{1/2}u, |A|^{1/2}v)_2 + (u^0, v^0)_2.
double e_inner(const GridFunction& u, const GridFunction& v, const SpectralDecomposition& dec);
double e_norm(const GridFunction& u, const SpectralDecomposition& dec);

/// CSV rows (index, eigenvalue, classification); index is 1-based.
void write_spectrum_csv(std::ostream& os, const SpectralDecomposition& dec);
/// Eigenvectors as M x N blocks separated by a "# e_i" header line.
void write_eigenvectors_csv(std::ostream& os, const SpectralDecomposition& dec, int count);

}  // namespace fountain
