#include "fountain/fourier.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <numbers>
#include <numeric>

namespace fountain::fourier {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Per-component DFT coefficients with evaluation of the interpolant.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const GridFunction& u) : grid_(u.grid()) {
    coeffs_.reserve(grid_.dim());
    for (int n = 0; n < grid_.dim(); ++n) coeffs_.push_back(dft(component(u, n)));
  }

  Eigen::VectorXd operator()(double t) const {
    const int M = grid_.nodes();
    const double w = kTwoPi * t / grid_.period();
    Eigen::VectorXd out(grid_.dim());
    for (int n = 0; n < grid_.dim(); ++n) {
      const auto& X = coeffs_[n];
      double s = X[0].real();
      for (int k = 1; k < M / 2; ++k) s += 2.0 * (X[k] * std::polar(1.0, k * w)).real();
      s += X[M / 2].real() * std::cos(0.5 * M * w);
      out[n] = s / M;
    }
    return out;
  }

 private:
  TimeGrid grid_;
  std::vector<Eigen::VectorXcd> coeffs_;
};

// Applies a multiplier per signed wavenumber k in (-M/2, M/2]; the Nyquist
// entry receives multiplier(M/2) applied to its (real) cosine part.
template <typename Mult>
GridFunction apply_multiplier(const GridFunction& u, Mult&& mult) {
  const int M = u.grid().nodes();
  GridFunction out(u.grid());
  for (int n = 0; n < u.grid().dim(); ++n) {
    Eigen::VectorXcd X = dft(component(u, n));
    for (int k = 0; k < M; ++k) {
      const int kk = k <= M / 2 ? k : k - M;
      X[k] *= mult(kk);
    }
    X[M / 2] = std::complex<double>(X[M / 2].real(), 0.0);
    const Eigen::VectorXd v = inverse_dft(X);
    for (int j = 0; j < M; ++j) out(j, n) = v[j];
  }
  return out;
}

}  // namespace

Eigen::MatrixXd neg_second_derivative_matrix(double period, int nodes) {
  const int M = nodes;
  const double h = kTwoPi / M;
  const double scale = std::pow(kTwoPi / period, 2);
  Eigen::MatrixXd A(M, M);
  const double diag = std::numbers::pi * std::numbers::pi / (3.0 * h * h) + 1.0 / 6.0;
  for (int j = 0; j < M; ++j) {
    for (int l = 0; l < M; ++l) {
      if (j == l) {
        A(j, l) = scale * diag;
      } else {
        const int d = j - l;
        const double s = std::sin(0.5 * d * h);
        const double sign = (d % 2 == 0) ? 1.0 : -1.0;
        A(j, l) = scale * sign / (2.0 * s * s);
      }
    }
  }
  return A;
}

Eigen::VectorXcd dft(const Eigen::VectorXd& x) {
  const int M = static_cast<int>(x.size());
  std::vector<std::complex<double>> tw(M);
  for (int m = 0; m < M; ++m) tw[m] = std::polar(1.0, -kTwoPi * m / M);
  Eigen::VectorXcd X(M);
  for (int k = 0; k < M; ++k) {
    std::complex<double> s = 0.0;
    for (int j = 0; j < M; ++j) s += x[j] * tw[(static_cast<long>(j) * k) % M];
    X[k] = s;
  }
  return X;
}

Eigen::VectorXd inverse_dft(const Eigen::VectorXcd& X) {
  const int M = static_cast<int>(X.size());
  std::vector<std::complex<double>> tw(M);
  for (int m = 0; m < M; ++m) tw[m] = std::polar(1.0, kTwoPi * m / M);
  Eigen::VectorXd x(M);
  for (int j = 0; j < M; ++j) {
    std::complex<double> s = 0.0;
    for (int k = 0; k < M; ++k) s += X[k] * tw[(static_cast<long>(j) * k) % M];
    x[j] = s.real() / M;
  }
  return x;
}

Eigen::VectorXd component(const GridFunction& u, int n) {
  Eigen::VectorXd v(u.grid().nodes());
  for (int j = 0; j < u.grid().nodes(); ++j) v[j] = u(j, n);
  return v;
}

GridFunction second_derivative(const GridFunction& u) {
  const double w = kTwoPi / u.grid().period();
  return apply_multiplier(u, [w](int k) { return std::complex<double>(-std::pow(w * k, 2), 0.0); });
}

GridFunction first_derivative(const GridFunction& u) {
  const double w = kTwoPi / u.grid().period();
  const int M = u.grid().nodes();
  // The Nyquist cosine has zero derivative at the nodes.
  return apply_multiplier(u, [w, M](int k) {
    return k == M / 2 ? std::complex<double>(0.0, 0.0) : std::complex<double>(0.0, w * k);
  });
}

GridFunction resample(const GridFunction& u, int nodes) {
  const TimeGrid fine(u.grid().period(), nodes, u.grid().dim());
  const int M = u.grid().nodes();
  const int P = nodes;
  GridFunction out(fine);
  for (int n = 0; n < u.grid().dim(); ++n) {
    const Eigen::VectorXcd X = dft(component(u, n));
    Eigen::VectorXcd Y = Eigen::VectorXcd::Zero(P);
    const double ratio = static_cast<double>(P) / M;
    const int kmax = std::min(M, P) / 2;
    Y[0] = ratio * X[0];
    for (int k = 1; k < kmax; ++k) {
      Y[k] = ratio * X[k];
      Y[P - k] = ratio * X[M - k];
    }
    if (P > M) {
      // Split the source Nyquist cosine evenly between +-M/2.
      Y[M / 2] = 0.5 * ratio * X[M / 2].real();
      Y[P - M / 2] = Y[M / 2];
    } else if (P == M) {
      Y[M / 2] = X[M / 2];
    } else {
      // Coarsening: the target Nyquist keeps the cosine part of +-P/2.
      Y[P / 2] = ratio * (X[P / 2] + X[M - P / 2]).real();
    }
    const Eigen::VectorXd v = inverse_dft(Y);
    for (int j = 0; j < P; ++j) out(j, n) = v[j];
  }
  return out;
}

Eigen::VectorXd evaluate(const GridFunction& u, double t) { return TrigInterpolant(u)(t); }

GridFunction shifted(const GridFunction& u, double s) {
  const double w = kTwoPi / u.grid().period();
  const int M = u.grid().nodes();
  return apply_multiplier(u, [w, s, M](int k) {
    if (k == M / 2) return std::complex<double>(std::cos(w * k * s), 0.0);
    return std::polar(1.0, w * k * s);
  });
}

std::vector<double> harmonic_energy(const GridFunction& u) {
  const int M = u.grid().nodes();
  std::vector<double> e(M / 2 + 1, 0.0);
  for (int n = 0; n < u.grid().dim(); ++n) {
    const Eigen::VectorXcd X = dft(component(u, n));
    for (int h = 0; h <= M / 2; ++h) {
      double v = std::norm(X[h]);
      if (h > 0 && h < M / 2) v += std::norm(X[M - h]);
      e[h] += v / (static_cast<double>(M) * M);
    }
  }
  return e;
}

int period_divisor(const GridFunction& u, double rel_tol) {
  const auto e = harmonic_energy(u);
  double emax = 0.0;
  for (std::size_t h = 1; h < e.size(); ++h) emax = std::max(emax, e[h]);
  if (emax == 0.0) return 1;
  int g = 0;
  for (std::size_t h = 1; h < e.size(); ++h)
    if (e[h] > rel_tol * rel_tol * emax) g = std::gcd(g, static_cast<int>(h));
  return g == 0 ? 1 : g;
}

double interpolated_sup(const GridFunction& u) {
  const TrigInterpolant interp(u);
  const int M = u.grid().nodes();
  const int scan = 8 * M;
  const double dt = u.grid().period() / scan;
  int best = 0;
  double best_val = -1.0;
  for (int i = 0; i < scan; ++i) {
    const double v = interp(i * dt).squaredNorm();
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const auto neg = [&](double t) { return -interp(t).squaredNorm(); };
  const auto r = boost::math::tools::brent_find_minima(neg, (best - 1) * dt, (best + 1) * dt, 50);
  return std::sqrt(std::max(best_val, -r.second));
}

}  // namespace fountain::fourier
