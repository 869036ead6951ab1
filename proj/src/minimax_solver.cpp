#include "fountain/minimax_solver.hpp"

#include "fountain/fourier.hpp"
#include "fountain/parallel.hpp"
#include "fountain/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace fountain {

void SolverConfig::validate() const {
  const auto fail = [](const std::string& m) { throw std::invalid_argument("solver: " + m); };
  if (k < 1) fail("k must be positive");
  if (lambda_schedule.empty()) fail("lambda schedule is empty");
  for (std::size_t i = 0; i < lambda_schedule.size(); ++i) {
    const double l = lambda_schedule[i];
    if (!(l > 0.0 && l <= 2.0)) fail("lambda schedule entries must lie in (0, 2]");
    if (i > 0 && !(l < lambda_schedule[i - 1])) fail("lambda schedule must be strictly decreasing");
  }
  if (lambda_schedule.back() != 1.0) fail("lambda schedule must end at 1");
  if (starts < 0) fail("starts must be nonnegative");
  if (start_radii.empty()) fail("start radii are empty");
  for (double r : start_radii)
    if (!(r > 0.0)) fail("start radii must be positive");
  if (!(tol_g > 0.0)) fail("tol_g must be positive");
  if (max_iter < 1) fail("max_iter must be positive");
  if (!(deflation_distance > 0.0)) fail("deflation distance must be positive");
  if (!(trust_factor > 0.0)) fail("trust factor must be positive");
}

namespace {

constexpr double kTrivial = 1e-8;
constexpr double kRcond = 1e-11;
constexpr double kStepTol = 1e-8;
constexpr double kRoundStep = 1e-12;
constexpr double kNoise = 1e-13;

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

}  // namespace

CriticalPoint find_critical(const FunctionalContext& ctx, const GridFunction& u0, double lambda, int k,
                            const SolverConfig& config) {
  const RestrictedFunctional rf(ctx, SubspaceSelector::Y(k));
  const Eigen::VectorXd sw = rf.weights().cwiseSqrt();
  const auto residual = [&](const Eigen::VectorXd& a) -> Eigen::VectorXd {
    return rf.dual(a.cwiseQuotient(sw), lambda).cwiseQuotient(sw);
  };
  const auto jacobian = [&](const Eigen::VectorXd& a) -> Eigen::MatrixXd {
    const Eigen::MatrixXd H = rf.hessian(a.cwiseQuotient(sw), lambda);
    return H.cwiseQuotient(sw * sw.transpose());
  };
  const auto safe_norm = [&](const Eigen::VectorXd& a) {
    try {
      const Eigen::VectorXd r = residual(a);
      return r.allFinite() ? r.norm() : std::numeric_limits<double>::infinity();
    } catch (const NonFiniteEvaluation&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  Eigen::VectorXd a = rf.coordinates(u0).cwiseProduct(sw);
  Eigen::VectorXd r = residual(a);
  double nr = r.norm();
  double mu = -1.0;
  int it = 0;
  bool converged = false;
  // A small gradient alone is not enough: near a degenerate zero (a cubic
  // kernel direction) |r| drops below tol_g while the Newton step is still
  // of the size of u, so the step length must be small too.
  for (;; ++it) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobian(a));
    const Eigen::VectorXd& ev = es.eigenvalues();
    const Eigen::MatrixXd& V = es.eigenvectors();
    const Eigen::VectorXd rv = V.transpose() * r;
    const double cut = kRcond * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    // Components of r at the round-off level of its terms carry no information.
    const double noise = kNoise * (1.0 + a.norm());
    Eigen::VectorXd sv(ev.size());
    for (int i = 0; i < ev.size(); ++i)
      sv[i] = std::abs(ev[i]) > cut && std::abs(rv[i]) > noise ? -rv[i] / ev[i] : 0.0;
    const Eigen::VectorXd step = V * sv;
    const bool small = nr <= config.tol_g;
    if (small && step.norm() <= kStepTol * (1.0 + a.norm())) {
      converged = true;
      break;
    }
    if (it >= config.max_iter) break;

    bool accepted = false;
    for (double t = 1.0; t >= 1.0 / 1024; t *= 0.5) {
      const double n = safe_norm(a + t * step);
      if (n <= (1.0 - 1e-4 * t) * nr) {
        a += t * step;
        accepted = true;
        break;
      }
    }
    if (!accepted && !small) {
      // Levenberg-Marquardt on |r|^2 with J^T J = J^2 in the same eigenbasis.
      if (mu < 0.0) mu = 1e-3 * std::max(ev.cwiseAbs2().maxCoeff(), 1e-300);
      for (int tries = 0; tries < 40 && !accepted; ++tries, mu *= 10.0) {
        for (int i = 0; i < ev.size(); ++i) sv[i] = -ev[i] * rv[i] / (ev[i] * ev[i] + mu);
        const Eigen::VectorXd s = V * sv;
        if (safe_norm(a + s) < nr) {
          a += s;
          accepted = true;
          mu = std::max(mu / 100.0, 1e-300);
        }
      }
    }
    if (!accepted) {
      // Rounding floor: nothing reduces |r| and either |r| is within tolerance
      // or the Newton correction is at the level of round-off.
      if (small || step.norm() <= kRoundStep * (1.0 + a.norm())) {
        converged = true;
        break;
      }
      throw SolverFailure("find_critical: no step reduces the gradient norm " + sci(nr),
                          rf.synthesize(a.cwiseQuotient(sw)), nr);
    }
    r = residual(a);
    nr = r.norm();
  }
  const Eigen::VectorXd c = a.cwiseQuotient(sw);
  if (!converged)
    throw SolverFailure("find_critical: gradient norm " + sci(nr) + " after " +
                            std::to_string(config.max_iter) + " iterations",
                        rf.synthesize(c), nr);

  CriticalPoint cp{rf.synthesize(c)};
  cp.lambda = lambda;
  cp.k = k;
  cp.value = rf.value(c, lambda);
  cp.grad_norm = nr;
  cp.norm_E = a.norm();
  cp.trivial = cp.norm_E < kTrivial;
  cp.iterations = it;
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(jacobian(a), Eigen::EigenvaluesOnly).eigenvalues();
  const double cut = kRcond * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  cp.morse = static_cast<int>((ev.array() < -cut).count());
  cp.residual = strong_residual(ctx, cp.u).sup;
  return cp;
}

double pair_distance(const FunctionalContext& ctx, const GridFunction& a, const GridFunction& b) {
  const auto& dec = ctx.spectrum();
  const bool even = ctx.potential().even;
  double d = e_norm(a - b, dec);
  if (even) d = std::min(d, e_norm(a + b, dec));
  if (ctx.autonomous()) {
    const Alignment al = align(a, b, even);
    d = std::min(d, e_norm(a - al.sign * fourier::shifted(b, al.shift), dec));
  }
  return d;
}

namespace {

// Flip the sign so the largest eigen-coefficient is positive.
void canonical_sign(const FunctionalContext& ctx, CriticalPoint& cp) {
  if (!ctx.potential().even) return;
  const Eigen::VectorXd c = ctx.spectrum().coefficients(cp.u);
  Eigen::Index i = 0;
  c.cwiseAbs().maxCoeff(&i);
  if (c[i] < 0.0) cp.u = -cp.u;
}

}  // namespace

CriticalSet multistart_collect(const FunctionalContext& ctx, double lambda, int k, const SolverConfig& config) {
  config.validate();
  const RestrictedFunctional rf(ctx, SubspaceSelector::Y(k));
  const Eigen::VectorXd sw = rf.weights().cwiseSqrt();
  std::vector<GridFunction> starts;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double R : config.start_radii) {
    if (config.mode_starts)
      for (int i = 0; i < k; ++i) starts.push_back(rf.synthesize(R * Eigen::VectorXd::Unit(k, i).cwiseQuotient(sw)));
    for (int s = 0; s < config.starts; ++s) {
      Eigen::VectorXd a(k);
      for (int i = 0; i < k; ++i) a[i] = normal(rng);
      starts.push_back(rf.synthesize((R / a.norm()) * a.cwiseQuotient(sw)));
    }
  }

  std::vector<std::optional<CriticalPoint>> found(starts.size());
  parallel_for(static_cast<int>(starts.size()), config.jobs, [&](int i) {
    try {
      found[i] = find_critical(ctx, starts[i], lambda, k, config);
    } catch (const SolverFailure&) {
    } catch (const NonFiniteEvaluation&) {
    }
  });

  CriticalSet out;
  out.starts = static_cast<int>(starts.size());
  std::vector<CriticalPoint> candidates;
  for (auto& f : found) {
    if (!f) {
      ++out.failures;
      continue;
    }
    ++out.converged;
    // The origin is a known critical point when grad W(t, 0) = 0, so points
    // within the exclusion radius of it are its duplicates.
    if (f->trivial || f->norm_E <= config.deflation_distance) {
      ++out.trivial;
      continue;
    }
    candidates.push_back(std::move(*f));
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const CriticalPoint& x, const CriticalPoint& y) {
    return x.value != y.value ? x.value < y.value : x.norm_E < y.norm_E;
  });
  for (auto& cand : candidates) {
    bool duplicate = false;
    for (const auto& kept : out.points) {
      if (std::abs(kept.value - cand.value) > 1e-6 * (1.0 + std::abs(cand.value)) &&
          std::abs(kept.norm_E - cand.norm_E) > config.deflation_distance)
        continue;
      if (pair_distance(ctx, kept.u, cand.u) <= config.deflation_distance) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      canonical_sign(ctx, cand);
      out.points.push_back(std::move(cand));
    }
  }
  return out;
}

const char* to_string(BranchStatus s) {
  switch (s) {
    case BranchStatus::converged: return "converged";
    case BranchStatus::lost: return "lost";
    case BranchStatus::diverged: return "diverged";
  }
  return "?";
}

Branch continue_branch(const FunctionalContext& ctx, const CriticalPoint& cp, const SolverConfig& config) {
  config.validate();
  Branch b;
  b.points.push_back(cp);
  for (double lambda : config.lambda_schedule) {
    if (lambda >= cp.lambda - 1e-12) continue;
    const CriticalPoint& prev = b.points.back();
    std::optional<CriticalPoint> solved;
    try {
      solved = find_critical(ctx, prev.u, lambda, cp.k, config);
    } catch (const SolverFailure& e) {
      b.status = BranchStatus::lost;
      b.note = std::string("corrector failed at lambda = ") + std::to_string(lambda) + ": " + e.what();
      return b;
    } catch (const NonFiniteEvaluation& e) {
      b.status = BranchStatus::diverged;
      b.note = e.what();
      return b;
    }
    CriticalPoint& next = *solved;
    if (!std::isfinite(next.norm_E) || next.norm_E > 1e8 * (1.0 + cp.norm_E)) {
      b.status = BranchStatus::diverged;
      b.note = "norm blew up at lambda = " + std::to_string(lambda);
      return b;
    }
    if (next.trivial && !prev.trivial) {
      b.status = BranchStatus::lost;
      b.note = "collapsed to the trivial point at lambda = " + std::to_string(lambda);
      return b;
    }
    const double jump = e_norm(next.u - prev.u, ctx.spectrum());
    b.points.push_back(std::move(next));
    if (jump > config.trust_factor * (1.0 + prev.norm_E)) {
      b.status = BranchStatus::lost;
      b.note = "step at lambda = " + std::to_string(lambda) + " left the trust region";
      return b;
    }
  }
  if (b.points.back().lambda != 1.0) {
    b.status = BranchStatus::lost;
    b.note = "schedule did not reach lambda = 1";
  }
  return b;
}

bool value_in_bracket(const Branch& branch, double lower, double upper) {
  if (branch.points.empty()) return false;
  const double v = branch.points.back().value;
  return v >= lower && v <= upper;
}

Refinement refine_level(const FunctionalContext& fine, const CriticalPoint& cp, int k_new,
                        const SolverConfig& config, double flag_tol) {
  const auto& g = cp.u.grid();
  if (g.period() != fine.grid().period() || g.dim() != fine.grid().dim() || fine.grid().nodes() < g.nodes())
    throw std::invalid_argument("refine_level: the fine grid must share T and N and have M' >= M");
  if (k_new < cp.k) throw std::invalid_argument("refine_level: k' must be at least k");
  const GridFunction lifted = fourier::resample(cp.u, fine.grid().nodes());
  Refinement out{find_critical(fine, lifted, cp.lambda, k_new, config)};
  out.increment = e_norm(out.point.u - lifted, fine.spectrum());
  out.flagged = out.increment > flag_tol * (1.0 + out.point.norm_E);
  return out;
}

BoundednessReport boundedness_diagnostics(const std::vector<double>& norms, GrowthMode mode,
                                          const HypothesisConstants& k) {
  BoundednessReport rep;
  std::vector<double> ex{0.0};
  if (mode == GrowthMode::asymptotic) {
    if (!k.mu) throw MissingConstant("boundedness diagnostic requires 'mu'");
    ex.push_back(*k.mu);
  } else {
    if (!k.nu || !k.varrho) throw MissingConstant("boundedness diagnostic requires 'nu' and 'varrho'");
    ex.push_back(1.0);
    ex.push_back(*k.nu - *k.varrho);
  }
  std::sort(ex.begin(), ex.end());
  ex.erase(std::unique(ex.begin(), ex.end()), ex.end());
  for (double e : ex)
    if (!(e < 2.0)) throw std::invalid_argument("boundedness diagnostic: exponents must be below 2");
  rep.exponents = ex;
  rep.coefficients.assign(ex.size(), 0.0);
  const int n = static_cast<int>(norms.size());
  if (n < 3) {
    rep.note = "fewer than three points; nothing to test";
    return rep;
  }
  const int m = static_cast<int>(ex.size());
  const int train = n - 1;
  Eigen::MatrixXd X(train, m);
  Eigen::VectorXd y(train);
  for (int i = 0; i < train; ++i) {
    for (int j = 0; j < m; ++j) X(i, j) = std::pow(norms[i], ex[j]);
    y[i] = norms[i] * norms[i];
  }
  // Nonnegative least squares by enumerating active sets (m <= 3).
  Eigen::VectorXd best = Eigen::VectorXd::Zero(m);
  double best_res = y.squaredNorm();
  for (int mask = 1; mask < (1 << m); ++mask) {
    std::vector<int> cols;
    for (int j = 0; j < m; ++j)
      if (mask & (1 << j)) cols.push_back(j);
    Eigen::MatrixXd Xs(train, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) Xs.col(c) = X.col(cols[c]);
    const Eigen::VectorXd sol = Xs.colPivHouseholderQr().solve(y);
    if ((sol.array() < 0.0).any() || !sol.allFinite()) continue;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(m);
    for (std::size_t c = 0; c < cols.size(); ++c) full[cols[c]] = sol[c];
    const double res = (X * full - y).squaredNorm();
    if (res < best_res) {
      best_res = res;
      best = full;
    }
  }
  // Shift the constant term so the fit envelopes every training point.
  const double lift = std::max(0.0, (y - X * best).maxCoeff());
  best[0] += lift;
  for (int j = 0; j < m; ++j) rep.coefficients[j] = best[j];
  rep.held_out = norms.back() * norms.back();
  rep.prediction = 0.0;
  for (int j = 0; j < m; ++j) rep.prediction += best[j] * std::pow(norms.back(), ex[j]);
  rep.passed = rep.held_out <= 1.1 * rep.prediction + 1e-12;
  if (!rep.passed) rep.note = "last norm exceeds the fitted self-bounding envelope";
  return rep;
}

BoundednessReport boundedness_diagnostics(const Branch& branch, GrowthMode mode, const HypothesisConstants& k) {
  std::vector<double> norms;
  for (const auto& p : branch.points) norms.push_back(p.norm_E);
  return boundedness_diagnostics(norms, mode, k);
}

}  // namespace fountain
