#include "fountain/fountain_geometry.hpp"

#include "fountain/format.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fountain {

namespace {

constexpr double kRelTol = 1e-6;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_plus_space(const SpectralDecomposition& dec, const SubspaceSelector& z, const char* where) {
  if (z.kind != SubspaceSelector::Kind::Z || z.k < dec.n_bar() + 1)
    throw std::invalid_argument(std::string(where) + ": need Z_k with k >= n-bar + 1 = " +
                                std::to_string(dec.n_bar() + 1));
}

// Columns e_i / sqrt(w_i): maps E-orthonormal coordinates a to node values.
Eigen::MatrixXd scaled_basis(const SpectralDecomposition& dec, const std::vector<int>& idx) {
  Eigen::MatrixXd B(dec.grid().size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    B.col(a) = dec.eigenvectors().col(idx[a]) / std::sqrt(dec.weights()[idx[a]]);
  return B;
}

Eigen::VectorXd to_full(const SpectralDecomposition& dec, const std::vector<int>& idx,
                        const Eigen::VectorXd& a) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dec.size());
  for (std::size_t i = 0; i < idx.size(); ++i) c[idx[i]] = a[i] / std::sqrt(dec.weights()[idx[i]]);
  return c;
}

Eigen::VectorXd from_full(const SpectralDecomposition& dec, const std::vector<int>& idx,
                          const Eigen::VectorXd& c) {
  Eigen::VectorXd a(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) a[i] = c[idx[i]] * std::sqrt(dec.weights()[idx[i]]);
  return a;
}

template <typename Holds>
bool holds_on_shell(const Potential& w, const SampleScheme& s,
                    const std::vector<std::vector<double>>& dirs, double r, Holds&& holds) {
  const std::vector<double> times = s.times.empty() ? std::vector<double>{0.0} : s.times;
  std::vector<double> u(w.dim);
  for (const auto& d : dirs)
    for (double t : times) {
      for (int i = 0; i < w.dim; ++i) u[i] = r * d[i];
      if (!holds(t, std::span<const double>(u), r)) return false;
    }
  return true;
}

std::vector<std::vector<double>> unit_directions(const SampleScheme& s, int dim) {
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> dirs;
  while (static_cast<int>(dirs.size()) < s.direction_count(dim)) {
    std::vector<double> d(dim);
    double n = 0.0;
    for (double& x : d) {
      x = normal(rng);
      n += x * x;
    }
    if (n < 1e-24) continue;
    for (double& x : d) x /= std::sqrt(n);
    dirs.push_back(std::move(d));
  }
  return dirs;
}

// Geometric bisection between a radius where `holds` is true and one where it fails.
template <typename Holds>
double refine_crossing(const Potential& w, const SampleScheme& s,
                       const std::vector<std::vector<double>>& dirs, double good, double bad,
                       Holds&& holds) {
  for (int i = 0; i < 80 && std::abs(std::log(bad / good)) > 1e-14; ++i) {
    const double mid = std::sqrt(good * bad);
    if (holds_on_shell(w, s, dirs, mid, holds)) good = mid;
    else bad = mid;
  }
  return good;
}

}  // namespace

SampleScheme GeometryOptions::default_scheme() {
  SampleScheme s;
  s.r_min = 1e-12;
  s.r_max = 1e12;
  s.shells = 241;
  return s;
}

double sup_norm_constant(const SpectralDecomposition& dec, const std::vector<int>& indices) {
  const int N = dec.grid().dim();
  const Eigen::MatrixXd B = scaled_basis(dec, indices);
  double best = 0.0;
  for (int j = 0; j < dec.grid().nodes(); ++j) {
    const Eigen::MatrixXd Bj = B.middleRows(j * N, N);
    const Eigen::MatrixXd G = Bj * Bj.transpose();
    const double top = N == 1 ? G(0, 0) : Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().maxCoeff();
    best = std::max(best, top);
  }
  return std::sqrt(best);
}

double certified_lp_bound(const SpectralDecomposition& dec, const SubspaceSelector& z, double p) {
  require_plus_space(dec, z, "certified_lp_bound");
  if (!(p >= 1.0)) throw std::invalid_argument("certified_lp_bound: p must be at least 1");
  const auto idx = z.indices(dec);
  const double T = dec.grid().period();
  const double tau2 = 1.0 / std::sqrt(dec.weights()[idx.front()]);
  const double kappa = sup_norm_constant(dec, idx);
  double bound = std::pow(T, 1.0 / p) * kappa;
  if (p <= 2.0) bound = std::min(bound, std::pow(T, 1.0 / p - 0.5) * tau2);
  if (p >= 2.0) bound = std::min(bound, std::pow(kappa, 1.0 - 2.0 / p) * std::pow(tau2, 2.0 / p));
  return bound;
}

LpSup sphere_sup_lp(const SpectralDecomposition& dec, const SubspaceSelector& z, double p,
                    const GeometryOptions& options, const Eigen::VectorXd* warm) {
  require_plus_space(dec, z, "sphere_sup_lp");
  if (!(p >= 1.0)) throw std::invalid_argument("sphere_sup_lp: p must be at least 1");
  const auto idx = z.indices(dec);
  const Eigen::MatrixXd B = scaled_basis(dec, idx);
  const int N = dec.grid().dim();
  const int M = dec.grid().nodes();
  const double h = dec.grid().weight();

  Objective f;
  f.value = [&](const Eigen::VectorXd& a) {
    const Eigen::VectorXd u = B * a;
    double s = 0.0;
    for (int j = 0; j < M; ++j) s += std::pow(u.segment(j * N, N).norm(), p);
    return std::pow(h * s, 1.0 / p);
  };
  f.gradient = [&](const Eigen::VectorXd& a) -> Eigen::VectorXd {
    const Eigen::VectorXd u = B * a;
    Eigen::VectorXd du(u.size());
    double s = 0.0;
    for (int j = 0; j < M; ++j) {
      const double r = u.segment(j * N, N).norm();
      s += std::pow(r, p);
      du.segment(j * N, N) = r > 0.0 ? Eigen::VectorXd(std::pow(r, p - 2.0) * u.segment(j * N, N))
                                     : Eigen::VectorXd::Zero(N);
    }
    if (s == 0.0) return Eigen::VectorXd::Zero(a.size());
    return h * std::pow(h * s, 1.0 / p - 1.0) * (B.transpose() * du);
  };

  SphereOptions o;
  o.starts = options.starts;
  o.max_iter = 500;
  o.seed = options.seed;
  o.jobs = options.jobs;
  if (warm && warm->size() == dec.size()) {
    const Eigen::VectorXd a = from_full(dec, idx, *warm);
    if (a.norm() > 0.0) o.warm_starts.push_back(a);
  }
  LpSup out;
  out.optimum = maximize_convex_on_sphere(f, static_cast<int>(idx.size()), 1.0, o);
  out.empirical = out.optimum.value;
  out.certified = certified_lp_bound(dec, z, p);
  out.argmax = to_full(dec, idx, out.optimum.point);
  return out;
}

double rho_aq(double ell, double c2, double constant) {
  if (!(ell > 0.0 && c2 > 0.0 && constant > 0.0))
    throw std::invalid_argument("rho_aq: ell, c2 and the constant must be positive");
  return constant * c2 * ell;
}

double rho_sq(double ell_nu, double a1, double nu) {
  if (!(nu > 2.0)) throw std::invalid_argument("rho_sq: nu must exceed 2");
  if (!(ell_nu > 0.0 && a1 > 0.0)) throw std::invalid_argument("rho_sq: ell and a1 must be positive");
  return std::pow(16.0 * a1 * std::pow(ell_nu, nu), 1.0 / (2.0 - nu));
}

double rho_sq_floor(double a1, double tau1, double a2, double period) {
  return std::max(16.0 * a1 * tau1 + 1.0, 16.0 * a2 * period);
}

Extremum sphere_extrema(const FunctionalContext& ctx, const SubspaceSelector& sel, double radius,
                        double lambda, Sense sense, const GeometryOptions& options, Domain domain,
                        const std::vector<Eigen::VectorXd>& warm) {
  if (!(radius > 0.0)) throw std::invalid_argument("sphere_extrema: radius must be positive");
  const RestrictedFunctional rf(ctx, sel);
  const Eigen::VectorXd sw = rf.weights().cwiseSqrt();
  Objective f;
  f.value = [&](const Eigen::VectorXd& a) { return rf.value(a.cwiseQuotient(sw), lambda); };
  f.gradient = [&](const Eigen::VectorXd& a) -> Eigen::VectorXd {
    return rf.dual(a.cwiseQuotient(sw), lambda).cwiseQuotient(sw);
  };
  SphereOptions o;
  o.starts = options.starts;
  o.max_iter = options.max_iter;
  o.seed = options.seed;
  o.domain = domain;
  o.jobs = options.jobs;
  for (const auto& c : warm)
    if (c.size() == ctx.spectrum().size()) {
      const Eigen::VectorXd a = from_full(ctx.spectrum(), rf.indices(), c);
      if (a.norm() > 0.0) o.warm_starts.push_back(a);
    }
  Extremum e;
  e.stats = optimize_on_sphere(f, rf.size(), radius, sense, o);
  e.value = e.stats.value;
  e.argopt = to_full(ctx.spectrum(), rf.indices(), e.stats.point);
  if (domain == Domain::ball) {
    // The origin belongs to the ball and is often the extremum itself.
    const double at_zero = rf.value(Eigen::VectorXd::Zero(rf.size()), lambda);
    const bool better = sense == Sense::minimize ? at_zero < e.value : at_zero > e.value;
    if (better) {
      e.value = at_zero;
      e.argopt.setZero();
    }
  }
  return e;
}

double c_constant(const SpectralDecomposition& dec, const SubspaceSelector& y) {
  const auto idx = y.indices(dec);
  double wmax = 0.0;
  for (int i : idx) wmax = std::max(wmax, dec.weights()[i]);
  return 1.0 / std::sqrt(wmax);
}

double delta_radius(const Potential& w, double C, const SampleScheme& scheme) {
  const auto radii = scheme.radii();
  const auto dirs = unit_directions(scheme, w.dim);
  const auto holds = [&](double t, std::span<const double> u, double r) {
    return w.W(t, u) >= r * r / (C * C);
  };
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (holds_on_shell(w, scheme, dirs, radii[i], holds)) continue;
    if (i == 0) return kNaN;
    return refine_crossing(w, scheme, dirs, radii[i - 1], radii[i], holds);
  }
  return radii.back();
}

double s_radius(const Potential& w, double eps, const SampleScheme& scheme) {
  const auto radii = scheme.radii();
  const auto dirs = unit_directions(scheme, w.dim);
  const auto holds = [&](double t, std::span<const double> u, double r) {
    return w.W(t, u) >= r * r / (eps * eps * eps);
  };
  for (std::size_t i = radii.size(); i-- > 0;) {
    if (holds_on_shell(w, scheme, dirs, radii[i], holds)) continue;
    if (i + 1 == radii.size()) return kNaN;
    return refine_crossing(w, scheme, dirs, radii[i + 1], radii[i], holds);
  }
  return radii.front();
}

double measure_constant(const SpectralDecomposition& dec, const SubspaceSelector& y, int samples,
                        std::uint64_t seed) {
  const auto idx = y.indices(dec);
  const Eigen::MatrixXd B = scaled_basis(dec, idx);
  const int N = dec.grid().dim();
  const int M = dec.grid().nodes();
  const double h = dec.grid().weight();
  // For |u| = 1 the measure of {|u(t)| >= e} is h * #{j : |u_j| >= e}, so the
  // largest admissible e is max_i min(v_(i), i h) with v sorted descending.
  const auto eps_of = [&](const Eigen::VectorXd& a) {
    const Eigen::VectorXd u = B * (a / a.norm());
    std::vector<double> v(M);
    for (int j = 0; j < M; ++j) v[j] = u.segment(j * N, N).norm();
    std::sort(v.begin(), v.end(), std::greater<>());
    double e = 0.0;
    for (int i = 0; i < M; ++i) e = std::max(e, std::min(v[i], (i + 1) * h));
    return e;
  };
  const int m = static_cast<int>(idx.size());
  double eps = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) eps = std::min(eps, eps_of(Eigen::VectorXd::Unit(m, i)));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd a(m);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < m; ++i) a[i] = normal(rng);
    if (a.norm() > 0.0) eps = std::min(eps, eps_of(a));
  }
  return eps;
}

SubspaceConstants subspace_constants(const FunctionalContext& ctx, const SubspaceSelector& y,
                                     GrowthMode mode, const GeometryOptions& options) {
  if (y.kind != SubspaceSelector::Kind::Y)
    throw std::invalid_argument("subspace_constants: expects Y_k");
  SubspaceConstants out;
  out.C_k = c_constant(ctx.spectrum(), y);
  if (mode == GrowthMode::asymptotic) {
    out.delta_or_S = delta_radius(ctx.potential(), out.C_k, options.scheme);
  } else {
    out.eps_k = measure_constant(ctx.spectrum(), y, options.eps_samples, options.seed);
    out.delta_or_S = s_radius(ctx.potential(), out.eps_k, options.scheme);
  }
  return out;
}

std::string GeometryReport::flag_string() const {
  std::string s;
  for (const auto& [name, ok] : flags) {
    if (!s.empty()) s += '|';
    s += name + (ok ? "=1" : "=0");
  }
  return s;
}

int first_stable_level(const std::vector<GeometryReport>& table, const std::string& flag) {
  int level = 0;
  for (auto it = table.rbegin(); it != table.rend(); ++it) {
    const auto f = it->flags.find(flag);
    if (f == it->flags.end() || !f->second) break;
    level = it->k;
  }
  return level;
}

std::vector<GeometryReport> geometry_table(const FunctionalContext& ctx, int k_min, int k_max,
                                           const std::vector<double>& lambdas, GrowthMode mode,
                                           const GeometryOptions& options) {
  const auto& dec = ctx.spectrum();
  if (k_min < dec.n_bar() + 1 || k_max < k_min || k_max > dec.size())
    throw std::invalid_argument("geometry_table: need n-bar + 1 = " + std::to_string(dec.n_bar() + 1) +
                                " <= k_min <= k_max <= " + std::to_string(dec.size()));
  if (lambdas.empty()) throw std::invalid_argument("geometry_table: empty lambda set");
  const bool aq = mode == GrowthMode::asymptotic;
  HypothesisConstants hc = ctx.potential().constants;
  const char* missing = nullptr;
  if (aq) {
    if (!hc.c2) missing = "c2";
    else if (!hc.R2) missing = "R2";
  } else {
    if (!hc.a1) missing = "a1";
    else if (!hc.nu) missing = "nu";
    else if (!(*hc.nu > 2.0)) throw std::invalid_argument("geometry_table: nu must exceed 2");
    if (!missing && !hc.a2) hc.a2 = derive_growth_constants(ctx.potential(), options.scheme).a2;
  }
  if (missing) throw MissingConstant(std::string("geometry_table requires constant '") + missing + "'");
  const double p = aq ? 1.0 : *hc.nu;
  const double T = ctx.grid().period();

  struct Level {
    LpSup ell, ell1;
    double tau_Y, tau_Z;
    SubspaceConstants sc;
    double rho, r, bound;
  };
  const int levels = k_max - k_min + 1;
  std::vector<Level> lv(levels);
  Eigen::VectorXd warm, warm1;
  for (int k = k_max; k >= k_min; --k) {
    Level& L = lv[k - k_min];
    const auto z = SubspaceSelector::Z(k);
    const auto y = SubspaceSelector::Y(k);
    L.ell = sphere_sup_lp(dec, z, p, options, warm.size() ? &warm : nullptr);
    warm = L.ell.argmax;
    if (aq) {
      L.ell1 = L.ell;
    } else {
      L.ell1 = sphere_sup_lp(dec, z, 1.0, options, warm1.size() ? &warm1 : nullptr);
      warm1 = L.ell1.argmax;
    }
    L.tau_Y = sup_norm_constant(dec, y.indices(dec));
    L.tau_Z = sup_norm_constant(dec, z.indices(dec));
    L.sc = subspace_constants(ctx, y, mode, options);
    if (aq) {
      L.rho = rho_aq(L.ell.certified, *hc.c2, options.rho_constant);
      L.bound = *hc.R2 / L.tau_Z;
      L.r = 0.5 * std::min(L.rho, L.sc.delta_or_S / L.tau_Y);
    } else {
      L.rho = rho_sq(L.ell.certified, *hc.a1, *hc.nu);
      L.bound = rho_sq_floor(*hc.a1, L.ell1.certified, *hc.a2, T);
      L.r = 1.1 * std::max(L.rho, L.sc.delta_or_S / L.sc.eps_k);
    }
  }

  std::vector<GeometryReport> table;
  std::vector<Eigen::VectorXd> alpha_warm(lambdas.size());
  std::vector<GeometryReport> by_level;
  for (int k = k_max; k >= k_min; --k) {
    const Level& L = lv[k - k_min];
    const auto z = SubspaceSelector::Z(k);
    const auto y = SubspaceSelector::Y(k);
    double zeta_bar = kNaN;
    if (!aq && std::isfinite(L.r))
      zeta_bar = sphere_extrema(ctx, y, L.r, 1.0, Sense::maximize, options, Domain::ball).value;
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      const double lambda = lambdas[li];
      GeometryReport g;
      g.k = k;
      g.lambda = lambda;
      g.mode = mode;
      g.p = p;
      g.ell_emp = L.ell.empirical;
      g.ell_cert = L.ell.certified;
      g.ell1_emp = L.ell1.empirical;
      g.ell1_cert = L.ell1.certified;
      g.tau_inf_Y = L.tau_Y;
      g.tau_inf_Z = L.tau_Z;
      g.rho = L.rho;
      g.r = L.r;
      g.C_k = L.sc.C_k;
      g.delta_or_S = L.sc.delta_or_S;
      g.eps_k = L.sc.eps_k;
      g.rho_bound = L.bound;
      g.zeta_bar = zeta_bar;

      std::vector<Eigen::VectorXd> wa;
      if (alpha_warm[li].size()) wa.push_back(alpha_warm[li]);
      const Extremum alpha = sphere_extrema(ctx, z, L.rho, lambda, Sense::minimize, options, Domain::sphere, wa);
      alpha_warm[li] = alpha.argopt;
      g.alpha_hat = alpha.value;
      g.alpha_stats = alpha.stats;
      const Extremum xi = sphere_extrema(ctx, z, L.rho, lambda, Sense::minimize, options, Domain::ball, wa);
      g.xi_hat = xi.value;
      g.xi_stats = xi.stats;
      if (std::isfinite(L.r) && L.r > 0.0) {
        const Extremum beta = sphere_extrema(ctx, y, L.r, lambda, Sense::maximize, options);
        g.beta_hat = beta.value;
        g.beta_stats = beta.stats;
      } else {
        g.beta_hat = kNaN;
      }
      g.beta_ceiling = -0.5 * L.r * L.r;

      auto& f = g.flags;
      f["ell_cert_ok"] = g.ell_emp <= g.ell_cert * (1.0 + 1e-12);
      f["alpha_pos"] = g.alpha_hat > 0.0;
      f["beta_neg"] = g.beta_hat < 0.0;
      f["beta_ok"] = g.beta_hat <= g.beta_ceiling * (1.0 - kRelTol);
      f["optimizer_ok"] = !g.alpha_stats.stagnated && !g.xi_stats.stagnated &&
                          (!std::isfinite(g.beta_hat) || !g.beta_stats.stagnated);
      if (aq) {
        g.alpha_floor = 0.25 * g.rho * g.rho;
        g.xi_floor = -2.0 * *hc.c2 * g.ell_cert * g.rho;
        f["rho_below_bound"] = g.rho < g.rho_bound;
        f["r_lt_rho"] = g.r < g.rho;
        f["alpha_floor_ok"] = g.alpha_hat >= g.alpha_floor * (1.0 - kRelTol);
      } else {
        // From the lower bound on Z_k: each of the three subtracted terms is
        // at most rho^2 / 8 once rho exceeds the floor.
        g.alpha_floor = 0.125 * g.rho * g.rho;
        g.xi_floor = kNaN;
        f["rho_above_floor"] = g.rho > g.rho_bound;
        f["r_gt_rho"] = g.r > g.rho;
        f["alpha_floor_ok"] = g.alpha_hat >= g.alpha_floor * (1.0 - kRelTol);
        f["alpha_quarter"] = g.alpha_hat >= 0.25 * g.rho * g.rho * (1.0 - kRelTol);
      }
      by_level.push_back(std::move(g));
    }
  }
  std::reverse(by_level.begin(), by_level.end());
  // Restore lambda order within each level after the reversal.
  for (std::size_t i = 0; i < by_level.size(); i += lambdas.size())
    std::reverse(by_level.begin() + i, by_level.begin() + i + lambdas.size());

  const std::string gate = aq ? "rho_below_bound" : "rho_above_floor";
  int k_first = 0;
  for (int k = k_max; k >= k_min; --k) {
    bool ok = true;
    for (const auto& g : by_level)
      if (g.k == k && !g.flags.at(gate)) ok = false;
    if (!ok) break;
    k_first = k;
  }
  for (auto& g : by_level) g.flags[aq ? "k_ge_k1" : "k_ge_k2"] = k_first > 0 && g.k >= k_first;
  table = std::move(by_level);
  return table;
}

void write_geometry_csv(std::ostream& os, const std::vector<GeometryReport>& table) {
  os << "k,lambda,ell_emp,ell_cert,rho,r,alpha_hat,alpha_floor,beta_hat,xi_hat,C_k,delta_or_S,eps_k,flags\n";
  for (const auto& g : table) {
    os << g.k;
    for (double v : {g.lambda, g.ell_emp, g.ell_cert, g.rho, g.r, g.alpha_hat, g.alpha_floor, g.beta_hat,
                     g.xi_hat, g.C_k, g.delta_or_S, g.eps_k})
      os << ',' << format_double(v);
    os << ',' << g.flag_string() << '\n';
  }
}

}  // namespace fountain
