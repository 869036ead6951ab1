#pragma once

#include "fountain/time_grid.hpp"

#include <complex>
#include <vector>

namespace fountain::fourier {

/// Matrix of -d^2/dt^2 on M equispaced nodes of period T, built from the
/// band-limited interpolant (Nyquist mode carried as a cosine). Symmetric
/// circulant; exact on every resolved trigonometric mode.
Eigen::MatrixXd neg_second_derivative_matrix(double period, int nodes);

/// Forward DFT X_k = sum_j x_j exp(-2 pi i jk/M), all k in [0, M).
Eigen::VectorXcd dft(const Eigen::VectorXd& samples);

/// Real samples from the inverse transform (the imaginary part is dropped).
Eigen::VectorXd inverse_dft(const Eigen::VectorXcd& coefficients);

/// Node values of component n.
Eigen::VectorXd component(const GridFunction& u, int n);

/// Second time derivative of the trigonometric interpolant, at the nodes.
GridFunction second_derivative(const GridFunction& u);

/// First time derivative of the trigonometric interpolant, at the nodes.
GridFunction first_derivative(const GridFunction& u);

/// Trigonometric interpolation onto a grid with `nodes` points (same T, N).
/// Coarsening truncates the spectrum.
GridFunction resample(const GridFunction& u, int nodes);

/// Interpolant value u(t) for arbitrary t.
Eigen::VectorXd evaluate(const GridFunction& u, double t);

/// v(t) = u(t + s) on the same nodes.
GridFunction shifted(const GridFunction& u, double s);

/// Sum over components of |X_h|^2 / M^2 for harmonics h = 0..M/2.
std::vector<double> harmonic_energy(const GridFunction& u);

/// Number g such that the path is (numerically) T/g periodic: the gcd of
/// harmonics whose amplitude exceeds rel_tol times the largest one. Returns 1
/// for constant or zero paths.
int period_divisor(const GridFunction& u, double rel_tol = 1e-6);

/// sup_t |u(t)| of the interpolant (Euclidean norm over components), from an
/// oversampled scan refined by golden-section search.
double interpolated_sup(const GridFunction& u);

}  // namespace fountain::fourier
