#pragma once

#include "fountain/hypothesis_audit.hpp"
#include "fountain/subspace.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fountain {

struct SolverConfig {
  int k = 12;
  std::vector<double> lambda_schedule{2.0, 1.5, 1.25, 1.1, 1.05, 1.01, 1.0};
  /// Random starts per radius.
  int starts = 16;
  std::vector<double> start_radii{0.1, 1.0, 10.0};
  /// Also start from every single basis vector e_1..e_k at each radius.
  bool mode_starts = true;
  /// Stopping rule on the E-dual norm of the restricted gradient.
  double tol_g = 1e-10;
  int max_iter = 100;
  /// E-distance under which two critical points count as the same pair.
  double deflation_distance = 1e-4;
  /// Continuation steps longer than this factor times (1 + |u|) mark the
  /// branch as lost.
  double trust_factor = 1.0;
  std::uint64_t seed = 42;
  GrowthMode mode = GrowthMode::superquadratic;
  int jobs = 1;

  /// Throws std::invalid_argument on an unusable configuration.
  void validate() const;
};

struct CriticalPoint {
  GridFunction u;
  double lambda = 1.0;
  int k = 0;
  double value = 0.0;
  /// E-dual norm of Phi_lambda' restricted to Y_k.
  double grad_norm = 0.0;
  /// Sup norm of the strong ODE residual.
  double residual = 0.0;
  double norm_E = 0.0;
  /// Negative eigenvalues of the restricted Hessian.
  int morse = 0;
  bool trivial = false;
  int iterations = 0;
};

/// Newton and its fallback stalled or ran out of iterations.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, GridFunction last, double grad_norm)
      : std::runtime_error(what), last_(std::move(last)), grad_norm_(grad_norm) {}
  const GridFunction& last_iterate() const { return last_; }
  double grad_norm() const { return grad_norm_; }

 private:
  GridFunction last_;
  double grad_norm_;
};

/// Critical point of Phi_lambda restricted to Y_k from u0 (projected onto
/// Y_k). Newton steps with a pseudo-inverse of the Hessian in E-orthonormal
/// coordinates, Armijo backtracking on the gradient norm, and a
/// Levenberg-Marquardt (damped Gauss-Newton) fallback.
CriticalPoint find_critical(const FunctionalContext& ctx, const GridFunction& u0, double lambda, int k,
                            const SolverConfig& config);

struct CriticalSet {
  /// One representative per pair, sorted by (value, |u|).
  std::vector<CriticalPoint> points;
  int starts = 0;
  int converged = 0;
  int trivial = 0;
  int failures = 0;
};

/// E-distance between two paths, minimized over sign (even W) and over time
/// shifts (autonomous problems).
double pair_distance(const FunctionalContext& ctx, const GridFunction& a, const GridFunction& b);

CriticalSet multistart_collect(const FunctionalContext& ctx, double lambda, int k, const SolverConfig& config);

enum class BranchStatus { converged, lost, diverged };
const char* to_string(BranchStatus s);

struct Branch {
  std::vector<CriticalPoint> points;
  BranchStatus status = BranchStatus::converged;
  std::string note;
};

/// Follows cp through the schedule entries below cp.lambda down to 1, each
/// step corrected by find_critical from the previous point.
Branch continue_branch(const FunctionalContext& ctx, const CriticalPoint& cp, const SolverConfig& config);

/// The final value lies in [lower, upper].
bool value_in_bracket(const Branch& branch, double lower, double upper);

struct Refinement {
  CriticalPoint point;
  /// E-norm (fine grid) of the change from the lifted coarse solution.
  double increment = 0.0;
  bool flagged = false;
};

/// Lifts cp onto `fine` (same T and N, M' >= M) by trigonometric
/// interpolation and re-solves on Y_k'. Flags increments above
/// flag_tol * (1 + |u|).
Refinement refine_level(const FunctionalContext& fine, const CriticalPoint& cp, int k_new,
                        const SolverConfig& config, double flag_tol = 1e-6);

/// Hold-out fit of |u_n|^2 <= a + b |u_n|^mu (asymptotic) or
/// a + b |u_n| + c |u_n|^(nu - varrho) (superquadratic): nonnegative least
/// squares on all but the last point, shifted up to envelope them, then the
/// last point must stay below 1.1 times the prediction.
struct BoundednessReport {
  bool passed = true;
  std::vector<double> exponents;
  std::vector<double> coefficients;
  double held_out = 0.0;
  double prediction = 0.0;
  std::string note;
};

BoundednessReport boundedness_diagnostics(const std::vector<double>& norms, GrowthMode mode,
                                          const HypothesisConstants& constants);
BoundednessReport boundedness_diagnostics(const Branch& branch, GrowthMode mode,
                                          const HypothesisConstants& constants);

}  // namespace fountain
