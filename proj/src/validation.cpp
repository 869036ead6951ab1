#include "fountain/validation.hpp"

#include "fountain/fourier.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <cstdint>

namespace fountain {

namespace odeint = boost::numeric::odeint;

ResidualReport strong_residual(const FunctionalContext& ctx, const GridFunction& u) {
  require_same_grid(u.grid(), ctx.grid(), "strong_residual");
  const auto& grid = ctx.grid();
  const GridFunction g = potential_gradient(ctx, u);
  const GridFunction upp = fourier::second_derivative(u);
  ResidualReport rep;
  double sq = 0.0;
  for (int j = 0; j < grid.nodes(); ++j) {
    Eigen::Map<const Eigen::VectorXd> uj(u.at(j).data(), grid.dim());
    Eigen::Map<const Eigen::VectorXd> aj(upp.at(j).data(), grid.dim());
    Eigen::Map<const Eigen::VectorXd> gj(g.at(j).data(), grid.dim());
    const double r = (aj + ctx.path().at(j) * uj + gj).norm();
    sq += r * r;
    if (r > rep.sup) {
      rep.sup = r;
      rep.worst_node = j;
    }
  }
  rep.l2 = std::sqrt(grid.weight() * sq);
  const GridFunction up = fourier::first_derivative(u);
  const double T = grid.period();
  rep.periodicity_defect = (fourier::evaluate(u, T) - fourier::evaluate(u, 0.0)).norm() +
                           (fourier::evaluate(up, T) - fourier::evaluate(up, 0.0)).norm();
  return rep;
}

double weak_residual(const FunctionalContext& ctx, const GridFunction& u, int k, double lambda) {
  require_same_grid(u.grid(), ctx.grid(), "weak_residual");
  const auto& dec = ctx.spectrum();
  if (k < 1 || k > dec.size()) throw std::invalid_argument("weak_residual: k out of range");
  const GridFunction w = project(u, dec, SpectralPart::plus) + project(u, dec, SpectralPart::zero) +
                         lambda * project(u, dec, SpectralPart::minus);
  // A w = -w'' - U w; the kernel part contributes A w0 = 0 up to rounding.
  GridFunction aw = -fourier::second_derivative(w);
  for (int j = 0; j < ctx.grid().nodes(); ++j) {
    Eigen::Map<const Eigen::VectorXd> wj(w.at(j).data(), ctx.grid().dim());
    Eigen::Map<Eigen::VectorXd> out(aw.at(j).data(), ctx.grid().dim());
    out -= ctx.path().at(j) * wj;
  }
  const GridFunction r = aw - lambda * potential_gradient(ctx, u);
  double worst = 0.0;
  for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(l2_inner(r, dec.eigenfunction(i))));
  return worst;
}

namespace {

using State = std::array<double, 2>;

struct ScalarProblem {
  double omega2;
  const Potential& w;
  double force(double u) const {
    const double x[1] = {u};
    double g[1];
    w.gradient(0.0, x, g);
    return -omega2 * u - g[0];
  }
  double energy(double u, double v) const {
    const double x[1] = {u};
    return 0.5 * v * v + 0.5 * omega2 * u * u + w.W(0.0, x);
  }
};

struct HalfPeriod {
  double time;
  double energy_drift;
};

HalfPeriod half_period(const ScalarProblem& prob, double A, double tol) {
  const auto rhs = [&](const State& x, State& dx, double) {
    dx[0] = x[1];
    dx[1] = prob.force(x[0]);
  };
  auto stepper = odeint::make_dense_output(tol * std::max(1.0, A), tol, odeint::runge_kutta_dopri5<State>());
  const double a0 = std::abs(prob.force(A));
  if (!(a0 > 0.0) || !std::isfinite(a0)) throw OracleFailure("shooting: no restoring force at the amplitude", A, A);
  // Time scale from the curvature at the turning point.
  stepper.initialize(State{A, 0.0}, 0.0, 1e-3 * std::sqrt(A / a0));
  bool moving = false;
  for (long steps = 0; steps < 10'000'000; ++steps) {
    stepper.do_step(rhs);
    const State& x = stepper.current_state();
    if (x[1] < 0.0) moving = true;
    if (moving && x[1] >= 0.0) {
      // Henon: integrate (t, u) in the variable v from the previous state to v = 0.
      State y{stepper.previous_time(), stepper.previous_state()[0]};
      const double v0 = stepper.previous_state()[1];
      const auto henon = [&](const State& s, State& ds, double v) {
        const double a = prob.force(s[1]);
        ds[0] = 1.0 / a;
        ds[1] = v / a;
      };
      odeint::integrate_adaptive(odeint::make_controlled(tol * 1e-2, tol * 1e-2, odeint::runge_kutta_dopri5<State>()),
                                 henon, y, v0, 0.0, -v0 * 0.1);
      const double e0 = prob.energy(A, 0.0);
      const double e1 = prob.energy(y[1], 0.0);
      return {y[0], std::abs(e1 - e0) / std::max(std::abs(e0), 1e-300)};
    }
    if (!std::isfinite(x[0]) || !std::isfinite(x[1])) break;
  }
  throw OracleFailure("shooting: no turning point found", A, A);
}

}  // namespace

double shooting_period(const Potential& w, double omega2, double amplitude, double tol) {
  if (!(amplitude > 0.0)) throw std::invalid_argument("shooting_period: amplitude must be positive");
  return 2.0 * half_period(ScalarProblem{omega2, w}, amplitude, tol).time;
}

OracleOrbit oracle_shooting(const Potential& w, double omega2, const TimeGrid& grid, int j, double tol) {
  if (w.dim != 1 || grid.dim() != 1) throw std::invalid_argument("oracle_shooting: scalar problems only");
  if (!w.autonomous || !w.even) throw std::invalid_argument("oracle_shooting: W must be autonomous and even");
  if (j < 1) throw std::invalid_argument("oracle_shooting: j must be positive");
  const ScalarProblem prob{omega2, w};
  const double target = grid.period() / j;
  const auto period = [&](double A) { return 2.0 * half_period(prob, A, tol).time; };

  double lo = 1.0;
  double p_lo = period(lo);
  double hi = 2.0;
  double p_hi = period(hi);
  if (std::abs(p_hi - p_lo) <= 1e-9 * p_lo && std::abs(period(0.5) - p_lo) <= 1e-9 * p_lo)
    throw OracleFailure("oracle_shooting: period does not depend on the amplitude (isochronous)", 0.5, 2.0);
  // Expand geometrically in the direction that moves the period toward the target.
  const bool increasing = p_hi > p_lo;
  const bool go_up = (target > p_lo) == increasing;
  double a = go_up ? lo : hi;
  double pa = go_up ? p_lo : p_hi;
  double b = go_up ? hi : lo;
  double pb = go_up ? p_hi : p_lo;
  for (int i = 0; (pa - target) * (pb - target) > 0.0; ++i) {
    if (i > 200) throw OracleFailure("oracle_shooting: no sign change of the period mismatch", std::min(a, b), std::max(a, b));
    a = b;
    pa = pb;
    b = go_up ? 2.0 * b : 0.5 * b;
    pb = period(b);
  }
  if (a > b) {
    std::swap(a, b);
    std::swap(pa, pb);
  }
  std::uintmax_t iters = 200;
  const auto root = boost::math::tools::toms748_solve(
      [&](double A) { return period(A) - target; }, a, b, pa - target, pb - target,
      boost::math::tools::eps_tolerance<double>(50), iters);
  const double A = 0.5 * (root.first + root.second);

  OracleOrbit orbit{A, target, j, GridFunction(grid), tol, half_period(prob, A, tol).energy_drift};
  const auto rhs = [&](const State& x, State& dx, double) {
    dx[0] = x[1];
    dx[1] = prob.force(x[0]);
  };
  std::vector<double> times;
  for (int n = 0; n < grid.nodes(); ++n) times.push_back(grid.node(n));
  State x{A, 0.0};
  int n = 0;
  odeint::integrate_times(odeint::make_dense_output(tol * std::max(1.0, A), tol, odeint::runge_kutta_dopri5<State>()),
                          rhs, x, times.begin(), times.end(), 1e-3 * target,
                          [&](const State& s, double) { orbit.trajectory(n++, 0) = s[0]; });
  return orbit;
}

Alignment align(const GridFunction& u, const GridFunction& v, bool allow_sign) {
  if (u.grid().period() != v.grid().period() || u.grid().dim() != v.grid().dim())
    throw std::invalid_argument("align: paths differ in period or dimension");
  const GridFunction w = v.grid().nodes() == u.grid().nodes() ? v : fourier::resample(v, u.grid().nodes());
  const auto& grid = u.grid();
  const int M = grid.nodes();
  const int N = grid.dim();
  Alignment best;
  best.l2 = std::numeric_limits<double>::infinity();
  best.sup = std::numeric_limits<double>::infinity();
  for (double sign : {1.0, -1.0}) {
    if (sign < 0.0 && !allow_sign) break;
    int m_best = 0;
    double c_best = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < M; ++m) {
      double c = 0.0;
      for (int j = 0; j < M; ++j)
        for (int n = 0; n < N; ++n) c += u(j, n) * w((j + m) % M, n);
      c *= sign;
      if (c > c_best) {
        c_best = c;
        m_best = m;
      }
    }
    const double h = grid.weight();
    const auto dist = [&](double s) {
      const GridFunction d = u - sign * fourier::shifted(w, s);
      return std::sqrt(l2_inner(d, d));
    };
    const auto [s, l2] = boost::math::tools::brent_find_minima(dist, (m_best - 1) * h, (m_best + 1) * h, 52);
    const GridFunction diff = u - sign * fourier::shifted(w, s);
    double sup = 0.0;
    for (int j = 0; j < M; ++j) {
      double r = 0.0;
      for (int n = 0; n < N; ++n) r += diff(j, n) * diff(j, n);
      sup = std::max(sup, std::sqrt(r));
    }
    if (sup < best.sup) best = {s, sign, sup, l2};
  }
  return best;
}

double compare_to_oracle(const GridFunction& u, const OracleOrbit& orbit) {
  return align(u, orbit.trajectory).sup;
}

}  // namespace fountain
