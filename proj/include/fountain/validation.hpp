#pragma once

#include "fountain/action_functional.hpp"

#include <stdexcept>
#include <string>

namespace fountain {

/// r(t) = u'' + U(t) u + grad W(t, u) at the nodes.
struct ResidualReport {
  double sup = 0.0;
  double l2 = 0.0;
  int worst_node = 0;
  /// |u(T) - u(0)| + |u'(T) - u'(0)| of the trigonometric interpolant.
  double periodicity_defect = 0.0;
};

/// u'' by spectral differentiation.
ResidualReport strong_residual(const FunctionalContext& ctx, const GridFunction& u);

/// max_{i < k} |Phi_lambda'(u) e_i| from the weak form
/// (A (u+ + lambda u-) - lambda grad W(u), e_i)_2, with A applied by spectral
/// differentiation rather than through the eigenvalues.
double weak_residual(const FunctionalContext& ctx, const GridFunction& u, int k, double lambda = 1.0);

/// Periodic orbit of u'' + omega2 u + W'(u) = 0 through (A, 0).
struct OracleOrbit {
  double amplitude = 0.0;
  double minimal_period = 0.0;
  int j = 1;
  GridFunction trajectory;
  double tolerance = 0.0;
  /// Relative change of the energy over a half period.
  double energy_drift = 0.0;
};

class OracleFailure : public std::runtime_error {
 public:
  OracleFailure(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double bracket_low() const { return lo_; }
  double bracket_high() const { return hi_; }

 private:
  double lo_, hi_;
};

/// Full period of the orbit through (A, 0): twice the time to the next zero
/// of u', located exactly by switching the independent variable to u'.
double shooting_period(const Potential& w, double omega2, double amplitude, double tol = 1e-12);

/// Amplitude whose orbit has minimal period T/j, by a geometric bracket scan
/// followed by a bracketing root finder on the period mismatch. The orbit is
/// sampled on `grid`. Requires N = 1 and an autonomous even W.
OracleOrbit oracle_shooting(const Potential& w, double omega2, const TimeGrid& grid, int j,
                            double tol = 1e-12);

/// Time shift s and sign minimizing |u - sign v(. + s)|_2, with the resulting
/// sup and L2 distances.
struct Alignment {
  double shift = 0.0;
  double sign = 1.0;
  double sup = 0.0;
  double l2 = 0.0;
};

Alignment align(const GridFunction& u, const GridFunction& v, bool allow_sign = true);

/// Sup-norm distance to the oracle after alignment in time and sign. The
/// oracle is resampled when its grid differs from that of u.
double compare_to_oracle(const GridFunction& u, const OracleOrbit& orbit);

}  // namespace fountain
