#pragma once

#include "fountain/hypothesis_audit.hpp"
#include "fountain/sphere_optimizer.hpp"
#include "fountain/subspace.hpp"

#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fountain {

struct GeometryOptions {
  int starts = 64;
  int max_iter = 1000;
  std::uint64_t seed = 42;
  /// The factor in rho_k = c * c2 * ell_k.
  double rho_constant = 8.0;
  /// Random paths used to estimate the measure constant eps_k.
  int eps_samples = 256;
  /// Radius ladder, directions and times for delta_k and S_k.
  SampleScheme scheme = default_scheme();
  int jobs = 1;

  static SampleScheme default_scheme();
};

/// sup |u|_p over the unit E-sphere of a subspace: a lower bound from
/// optimization and a certified upper bound.
struct LpSup {
  double empirical = 0.0;
  double certified = 0.0;
  SphereOptimum optimum;
  /// Maximizer as full-length eigen-coefficients c_i = (u, e_i)_2.
  Eigen::VectorXd argmax;
};

/// Exact max over the unit E-sphere of span{e_i : i in indices} of the
/// discrete sup norm max_j |u(t_j)|.
double sup_norm_constant(const SpectralDecomposition& dec, const std::vector<int>& indices);

/// Certified upper bound for sup |u|_p on the unit sphere of Z_k (k > n-bar).
double certified_lp_bound(const SpectralDecomposition& dec, const SubspaceSelector& z, double p);

/// Requires z = Z_k with k >= n-bar + 1. `warm` (full-length coefficients,
/// any scale) seeds the ascent; a maximizer from Z_{k+1} makes the empirical
/// sequence nonincreasing in k.
LpSup sphere_sup_lp(const SpectralDecomposition& dec, const SubspaceSelector& z, double p,
                    const GeometryOptions& options, const Eigen::VectorXd* warm = nullptr);

double rho_aq(double ell, double c2, double constant = 8.0);
/// (16 a1 ell_nu^nu)^(1/(2 - nu)), nu > 2.
double rho_sq(double ell_nu, double a1, double nu);
/// max{16 a1 tau1 + 1, 16 a2 T}.
double rho_sq_floor(double a1, double tau1, double a2, double period);

/// Extremum of Phi_lambda over {u in subspace : |u| = radius} (or the ball).
/// The point is returned as full-length eigen-coefficients.
struct Extremum {
  double value = 0.0;
  Eigen::VectorXd argopt;
  SphereOptimum stats;
};

Extremum sphere_extrema(const FunctionalContext& ctx, const SubspaceSelector& sel, double radius,
                        double lambda, Sense sense, const GeometryOptions& options,
                        Domain domain = Domain::sphere,
                        const std::vector<Eigen::VectorXd>& warm = {});

/// C_k with |u|_2 >= C_k |u| on Y_k.
double c_constant(const SpectralDecomposition& dec, const SubspaceSelector& y);

/// Largest radius delta with W(t,u) >= |u|^2 / C^2 on every sample with
/// |u| <= delta; the ladder crossing is refined by bisection. NaN when the
/// inequality fails on the first shell.
double delta_radius(const Potential& w, double C, const SampleScheme& scheme);

/// Smallest radius S with W(t,u) >= |u|^2 / eps^3 on every sample with
/// |u| >= S. NaN when it fails on the last shell.
double s_radius(const Potential& w, double eps, const SampleScheme& scheme);

/// Empirical eps_k: the largest eps with m{t : |u(t)| >= eps |u|} >= eps on
/// all sampled u in Y_k. An upper estimate of the true constant.
double measure_constant(const SpectralDecomposition& dec, const SubspaceSelector& y, int samples,
                        std::uint64_t seed);

struct SubspaceConstants {
  double C_k = 0.0;
  double delta_or_S = 0.0;
  double eps_k = std::numeric_limits<double>::quiet_NaN();
};

SubspaceConstants subspace_constants(const FunctionalContext& ctx, const SubspaceSelector& y,
                                     GrowthMode mode, const GeometryOptions& options);

struct GeometryReport {
  int k = 0;
  double lambda = 1.0;
  GrowthMode mode = GrowthMode::asymptotic;
  /// p = 1 in asymptotic mode, p = nu in superquadratic mode.
  double p = 1.0;
  double ell_emp = 0.0, ell_cert = 0.0;
  double ell1_emp = 0.0, ell1_cert = 0.0;
  double tau_inf_Y = 0.0, tau_inf_Z = 0.0;
  double rho = 0.0, r = 0.0;
  double alpha_hat = 0.0, alpha_floor = 0.0;
  double beta_hat = 0.0, beta_ceiling = 0.0;
  double xi_hat = 0.0, xi_floor = 0.0;
  /// Max of Phi_1 over the ball of radius r in Y_k (superquadratic mode).
  double zeta_bar = std::numeric_limits<double>::quiet_NaN();
  double C_k = 0.0, delta_or_S = 0.0;
  double eps_k = std::numeric_limits<double>::quiet_NaN();
  /// Threshold the radius must respect: R2 / tau_inf(Z_k) (asymptotic) or
  /// max{16 a1 tau1 + 1, 16 a2 T} (superquadratic).
  double rho_bound = 0.0;
  SphereOptimum alpha_stats, beta_stats, xi_stats;
  std::map<std::string, bool> flags;

  std::string flag_string() const;
};

/// Reports for every (k, lambda) with k_min <= k <= k_max, ordered by k then
/// lambda. Requires k_min > n-bar and the constants of the mode.
std::vector<GeometryReport> geometry_table(const FunctionalContext& ctx, int k_min, int k_max,
                                           const std::vector<double>& lambdas, GrowthMode mode,
                                           const GeometryOptions& options);

/// Smallest k of the table from which `flag` holds for every larger k; 0 if none.
int first_stable_level(const std::vector<GeometryReport>& table, const std::string& flag);

void write_geometry_csv(std::ostream& os, const std::vector<GeometryReport>& table);

}  // namespace fountain
