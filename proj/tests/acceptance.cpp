// Acceptance checks 1-9. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails.

#include "fountain/artifacts.hpp"
#include "fountain/expression.hpp"
#include "fountain/fourier.hpp"
#include "fountain/fountain_geometry.hpp"
#include "fountain/hypothesis_audit.hpp"
#include "fountain/minimax_solver.hpp"
#include "fountain/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace fountain;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kT = 2.0 * kPi;

namespace tol {
constexpr double spectrum = 1e-10;
constexpr double spectrum_seconds = 1.0;
constexpr double gradient = 1e-6;
constexpr double gradient_seconds = 10.0;
constexpr double functional = 1e-10;
constexpr double amplitude = 1e-4;  // times max(1, A)
constexpr double strong_residual = 1e-6;
constexpr double desk_seconds = 60.0;
constexpr double ell_monotone = 1e-6;
constexpr double geometry_rel = 1e-6;
constexpr double geometry_seconds = 300.0;
constexpr double symmetry = 1e-14;
constexpr double continuation = 1e-8;
}  // namespace tol

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %d %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, name, s, o.detail.empty() ? "" : ": ",
              o.detail.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GridFunction random_path(const TimeGrid& g, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n01;
  const int H = 8;
  std::vector<double> a(H + 1), b(H + 1);
  for (int h = 0; h <= H; ++h) {
    a[h] = scale * n01(rng) / (1 + h);
    b[h] = scale * n01(rng) / (1 + h);
  }
  return GridFunction::sample(g, [&](double t, std::span<double> out) {
    double s = 0.0;
    for (int h = 0; h <= H; ++h) s += a[h] * std::cos(h * t * kT / g.period()) + b[h] * std::sin(h * t * kT / g.period());
    out[0] = s;
  });
}

int dominant_harmonic(const GridFunction& u) {
  const auto e = fourier::harmonic_energy(u);
  int best = 1;
  for (std::size_t h = 1; h < e.size(); ++h)
    if (e[h] > e[best]) best = static_cast<int>(h);
  return best;
}

// u'' + u^3 = 0 with minimal period 2 pi / j: A = 4 K(1/sqrt 2) j / (2 pi).
double duffing_amplitude(int j) { return 4.0 * std::comp_ellint_1(1.0 / std::sqrt(2.0)) * j / kT; }

// Same constant from the arithmetic-geometric mean, K = pi / (2 agm(1, k')).
double duffing_amplitude_agm(int j) {
  double a = 1.0, b = std::sqrt(0.5);
  for (int i = 0; i < 40; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return 4.0 * (kPi / (2.0 * a)) * j / kT;
}

// u'' + (3/2) |u|^(1/2) sgn u = 0: the quarter period is
// A^(1/4) / sqrt 2 * (2/3) B(2/3, 1/2), so the period is c A^(1/4).
double aq_amplitude(int j) {
  const double c = 4.0 / std::sqrt(2.0) * (2.0 / 3.0) * std::beta(2.0 / 3.0, 0.5);
  return std::pow(kT / (j * c), 4.0);
}

struct Desk {
  FunctionalContext coarse;
  FunctionalContext fine;
  SolverConfig cfg;
  CriticalSet set;
  std::vector<Refinement> refined;
};

Desk desk_run(const Potential& w, GrowthMode mode, std::vector<double> radii) {
  const TimeGrid g(kT, 64, 1), gf(kT, 256, 1);
  Desk d{FunctionalContext(g, MatrixPath::zero(g), w), FunctionalContext(gf, MatrixPath::zero(gf), w), {}, {}, {}};
  d.cfg.mode = mode;
  d.cfg.start_radii = std::move(radii);
  d.cfg.starts = 8;
  d.set = multistart_collect(d.coarse, 1.0, 12, d.cfg);
  for (const auto& p : d.set.points) d.refined.push_back(refine_level(d.fine, p, 256, d.cfg));
  return d;
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const TimeGrid g(kT, 64, 1);
  const auto d0 = eigendecompose(assemble_operator(g, MatrixPath::zero(g)), g);
  const double expected[9] = {0, 1, 1, 4, 4, 9, 9, 16, 16};
  double err0 = 0.0, err1 = 0.0;
  for (int i = 0; i < 9; ++i) err0 = std::max(err0, std::abs(d0.eigenvalue(i) - expected[i]));
  const auto d1 = eigendecompose(assemble_operator(g, MatrixPath::constant(g, 1.0)), g);
  for (int i = 0; i < 9; ++i) err1 = std::max(err1, std::abs(d1.eigenvalue(i) - (expected[i] - 1.0)));
  const double s = seconds_since(t0);
  o.require(err0 <= tol::spectrum, fmt("U=0 error %.2e", err0));
  o.require(err1 <= tol::spectrum, fmt("U=1 error %.2e", err1));
  o.require(d1.n_minus() == 1 && d1.n_zero() == 2, "U=1 inertia " + std::to_string(d1.n_minus()) + "/" +
                                                     std::to_string(d1.n_zero()));
  o.require(s < tol::spectrum_seconds, fmt("runtime %.2f s", s));
  if (o.pass) o.detail = fmt("max error %.1e", std::max(err0, err1));
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const TimeGrid g(kT, 64, 1);
  const std::vector<std::pair<std::string, Potential>> builtins{
      {"quartic", power_potential(0.25, 4.0, 1)},
      {"three-halves", power_potential(1.0, 1.5, 1)},
      {"modulated cubic", modulated_power_potential(1.0, 3.0, 1, kT)},
      {"zero", zero_potential(1)}};
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> lam(1.0, 2.0);
  double worst = 0.0;
  for (const auto& [name, w] : builtins) {
    const FunctionalContext ctx(g, MatrixPath::zero(g), w);
    for (int trial = 0; trial < 20; ++trial) {
      const GridFunction u = random_path(g, rng, 1.0);
      const GridFunction v = random_path(g, rng, 1.0);
      const double l = lam(rng);
      const double analytic = e_inner(grad_phi_lambda(ctx, u, l), v, ctx.spectrum());
      const double h = 1e-5;
      const double fd = (phi_lambda(ctx, u + h * v, l) - phi_lambda(ctx, u - h * v, l)) / (2.0 * h);
      const double rel = std::abs(fd - analytic) / std::max({std::abs(analytic), std::abs(fd), 1e-300});
      worst = std::max(worst, rel);
      if (rel > tol::gradient) o.require(false, name + fmt(" relative error %.2e", rel));
    }
  }
  const double s = seconds_since(t0);
  o.require(s < tol::gradient_seconds, fmt("runtime %.2f s", s));
  if (o.pass) o.detail = fmt("worst relative error %.1e over 80 samples", worst);
  return o;
}

Outcome criterion3() {
  Outcome o;
  const TimeGrid g(kT, 64, 1);
  const FunctionalContext ctx(g, MatrixPath::zero(g), power_potential(0.25, 4.0, 1));
  const auto u = GridFunction::sample(g, [](double t, std::span<double> out) { out[0] = std::cos(t); });
  const double err = std::abs(phi(ctx, u) - 5.0 * kPi / 16.0);
  o.require(err <= tol::functional, fmt("error %.2e", err));
  if (o.pass) o.detail = fmt("error %.1e", err);
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Potential w = power_potential(0.25, 4.0, 1);
  const Desk d = desk_run(w, GrowthMode::superquadratic, {1.0, 3.0, 10.0, 30.0});
  o.require(d.set.points.size() >= 3, "only " + std::to_string(d.set.points.size()) + " pairs");
  for (std::size_t i = 1; i < d.set.points.size(); ++i)
    o.require(d.set.points[i].value > d.set.points[i - 1].value, "values not strictly increasing");
  std::map<int, const Refinement*> by_j;
  double worst_res = 0.0, worst_amp = 0.0;
  for (const auto& r : d.refined) {
    const double res = strong_residual(d.fine, r.point.u).sup;
    worst_res = std::max(worst_res, res);
    const int j = dominant_harmonic(r.point.u);
    if (!by_j.count(j)) by_j[j] = &r;
  }
  o.require(worst_res <= tol::strong_residual, fmt("strong residual %.2e", worst_res));
  double prev = -INFINITY;
  for (int j = 1; j <= 3; ++j) {
    if (!by_j.count(j)) {
      o.require(false, "no solution with minimal period 2 pi / " + std::to_string(j));
      continue;
    }
    const auto& p = by_j[j]->point;
    o.require(fourier::period_divisor(p.u) == j, "period divisor mismatch at j = " + std::to_string(j));
    const double A = fourier::interpolated_sup(p.u);
    const double ref = duffing_amplitude(j);
    o.require(std::abs(ref - duffing_amplitude_agm(j)) < 1e-12, "elliptic oracles disagree");
    o.require(std::abs(ref - oracle_shooting(w, 0.0, d.fine.grid(), j).amplitude) <= 1e-9,
              "shooting oracle disagrees at j = " + std::to_string(j));
    const double err = std::abs(A - ref);
    worst_amp = std::max(worst_amp, err / std::max(1.0, ref));
    o.require(err <= tol::amplitude * std::max(1.0, ref), fmt("amplitude error %.2e", err));
    o.require(p.value > prev, "values not increasing in j");
    prev = p.value;
  }
  const double s = seconds_since(t0);
  o.require(s < tol::desk_seconds, fmt("runtime %.2f s", s));
  if (o.pass)
    o.detail = std::to_string(d.set.points.size()) + " pairs" + fmt(", amplitude error %.1e", worst_amp) +
               fmt(", strong residual %.1e", worst_res);
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Potential w = power_potential(1.0, 1.5, 1);
  const Desk d = desk_run(w, GrowthMode::asymptotic, {0.05, 0.3, 1.0, 3.0});
  std::vector<const CriticalPoint*> neg;
  for (const auto& p : d.set.points)
    if (p.value < 0.0) neg.push_back(&p);
  o.require(neg.size() >= 3, "only " + std::to_string(neg.size()) + " pairs with negative value");
  std::sort(neg.begin(), neg.end(), [](auto* a, auto* b) { return a->norm_E > b->norm_E; });
  for (std::size_t i = 1; i < neg.size(); ++i)
    o.require(neg[i]->value > neg[i - 1]->value, "values not increasing as the norm decreases");
  std::map<int, const Refinement*> by_j;
  for (const auto& r : d.refined) {
    if (r.point.value >= 0.0) continue;
    const int j = dominant_harmonic(r.point.u);
    if (!by_j.count(j)) by_j[j] = &r;
  }
  double worst = 0.0;
  for (int j = 1; j <= 3; ++j) {
    if (!by_j.count(j)) {
      o.require(false, "no solution with minimal period 2 pi / " + std::to_string(j));
      continue;
    }
    const double ref = aq_amplitude(j);
    o.require(std::abs(ref - oracle_shooting(w, 0.0, d.fine.grid(), j).amplitude) <= 1e-8 * std::max(1.0, ref),
              "shooting oracle disagrees at j = " + std::to_string(j));
    const double err = std::abs(fourier::interpolated_sup(by_j[j]->point.u) - ref);
    worst = std::max(worst, err / std::max(1.0, ref));
    o.require(err <= tol::amplitude * std::max(1.0, ref), fmt("amplitude error %.2e", err) + " at j = " +
                                                                std::to_string(j));
  }
  const double s = seconds_since(t0);
  o.require(s < tol::desk_seconds, fmt("runtime %.2f s", s));
  if (o.pass) o.detail = std::to_string(neg.size()) + " negative pairs" + fmt(", amplitude error %.1e", worst);
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const TimeGrid g(kT, 64, 1);
  {
    const FunctionalContext ctx(g, MatrixPath::zero(g), power_potential(1.0, 1.5, 1));
    const int nbar = ctx.spectrum().n_bar();
    const auto tab = geometry_table(ctx, nbar + 1, nbar + 15, {1.0, 2.0}, GrowthMode::asymptotic, {});
    const double c2 = *ctx.potential().constants.c2;
    const int k1 = first_stable_level(tab, "rho_below_bound");
    o.require(k1 > 0, "no level with rho below its bound");
    double prev_ell = INFINITY;
    int alpha_rows = 0;
    for (const auto& r : tab) {
      const std::string at = " at k = " + std::to_string(r.k);
      o.require(r.ell_emp > 0.0, "ell not positive" + at);
      if (r.lambda == 1.0) {
        o.require(r.ell_emp <= prev_ell * (1.0 + tol::ell_monotone), "ell increases" + at);
        prev_ell = r.ell_emp;
      }
      const double cert = std::sqrt(kT) / std::sqrt(ctx.spectrum().weights()[r.k - 1]);
      o.require(std::abs(r.ell_cert - cert) <= 1e-12 * cert, "certified bound differs" + at);
      o.require(r.ell_emp <= cert * (1.0 + 1e-12), "certified bound exceeded" + at);
      const double rho = 8.0 * c2 * r.ell_cert;
      o.require(std::abs(r.rho - rho) <= 1e-12 * rho, "rho differs" + at);
      o.require(r.r < r.rho && r.r < r.delta_or_S / r.tau_inf_Y, "r not below min(rho, delta / tau)" + at);
      o.require(r.beta_hat <= -0.5 * r.r * r.r * (1.0 - tol::geometry_rel), "beta above -r^2/2" + at);
      if (r.k >= k1) {
        ++alpha_rows;
        o.require(r.alpha_hat >= 0.25 * rho * rho * (1.0 - tol::geometry_rel), "alpha below rho^2/4" + at);
      }
    }
    o.detail = "AQ k1 = " + std::to_string(k1) + ", alpha checked on " + std::to_string(alpha_rows) + " rows";
  }
  {
    const FunctionalContext ctx(g, MatrixPath::zero(g), power_potential(0.25, 4.0, 1));
    const int nbar = ctx.spectrum().n_bar();
    const auto tab = geometry_table(ctx, nbar + 1, nbar + 15, {1.0}, GrowthMode::superquadratic, {});
    for (std::size_t i = 0; i < tab.size(); ++i) {
      const std::string at = " at k = " + std::to_string(tab[i].k);
      o.require(tab[i].r > tab[i].rho, "r not above rho" + at);
      if (i > 0) o.require(tab[i].rho >= tab[i - 1].rho, "SQ rho decreases" + at);
    }
    o.require(tab.back().rho > tab.front().rho, "SQ rho does not increase over the range");
  }
  const double s = seconds_since(t0);
  o.require(s < tol::geometry_seconds, fmt("runtime %.2f s", s));
  return o;
}

Outcome criterion7() {
  Outcome o;
  const TimeGrid g(kT, 64, 1);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lam(1.0, 1.9);
  const std::vector<Potential> ws{power_potential(0.25, 4.0, 1), power_potential(1.0, 1.5, 1),
                                  modulated_power_potential(1.0, 3.0, 1, kT)};
  double worst = 0.0;
  int monotone_checked = 0;
  for (int i = 0; i < 100; ++i) {
    const FunctionalContext ctx(g, MatrixPath::zero(g), ws[i % ws.size()]);
    const GridFunction u = random_path(g, rng, 2.0);
    const double l = lam(rng);
    const double a = phi_lambda(ctx, u, l), b = phi_lambda(ctx, -u, l);
    const double rel = std::abs(a - b) / std::max(1.0, std::abs(a));
    worst = std::max(worst, rel);
    o.require(rel <= tol::symmetry, fmt("asymmetry %.2e", rel));
    if (b_part(ctx, u) > 0.0) {
      ++monotone_checked;
      o.require(phi_lambda(ctx, u, l + 0.1) < a, "not decreasing in lambda");
    }
  }
  const FunctionalContext duff(g, MatrixPath::zero(g), power_potential(0.25, 4.0, 1));
  SolverConfig cfg;
  cfg.start_radii = {1.0, 3.0, 10.0};
  cfg.starts = 8;
  const auto set = multistart_collect(duff, 1.0, 12, cfg);
  for (const auto& p : set.points) {
    o.require(weak_residual(duff, -p.u, p.k) <= 1e-8, "negated solution is not critical");
    o.require(pair_distance(duff, p.u, -p.u) <= 1e-12, "pair distance does not identify u and -u");
  }
  if (o.pass)
    o.detail = fmt("worst asymmetry %.1e", worst) + ", " + std::to_string(monotone_checked) +
               " monotonicity checks, " + std::to_string(set.points.size()) + " pairs sign-closed";
  return o;
}

Outcome criterion8() {
  Outcome o;
  const TimeGrid g(kT, 64, 1);
  const FunctionalContext ctx(g, MatrixPath::zero(g), power_potential(0.25, 4.0, 1));
  SolverConfig cfg;
  cfg.start_radii = {1.0, 3.0, 10.0};
  cfg.starts = 8;
  const auto head = multistart_collect(ctx, 2.0, 12, cfg);
  o.require(!head.points.empty(), "no critical point at lambda = 2");
  if (!o.pass) return o;
  const auto& h = head.points.front();
  const Branch br = continue_branch(ctx, h, cfg);
  o.require(br.status == BranchStatus::converged, std::string("branch ") + to_string(br.status) + ": " + br.note);
  if (!o.pass) return o;
  const auto direct = find_critical(ctx, h.u, 1.0, 12, cfg);
  const double dist = e_norm(direct.u - br.points.back().u, ctx.spectrum());
  o.require(dist <= tol::continuation, fmt("distance %.2e", dist));
  if (o.pass) o.detail = fmt("E-distance %.1e", dist) + " after " + std::to_string(br.points.size()) + " steps";
  return o;
}

struct AuditCase {
  std::string label;
  std::function<AuditReport()> run;
  std::vector<Verdict> accepted;
};

Potential with(Potential w, const std::function<void(HypothesisConstants&)>& set) {
  w.constants = {};
  set(w.constants);
  return w;
}

Outcome criterion9() {
  Outcome o;
  SampleScheme s = SampleScheme::for_grid(TimeGrid(kT, 8, 1));
  const auto p15 = power_potential(1.0, 1.5, 1);
  const auto p3 = power_potential(1.0, 3.0, 1);
  const auto p2 = power_potential(1.0, 2.0, 1);
  const auto p4 = power_potential(0.25, 4.0, 1);
  const auto log1p = expression_potential("log(1 + abs(u))", {}, 1, kT, true);
  const auto V = Verdict::violated, N = Verdict::no_violation_found, I = Verdict::inconclusive;
  const std::vector<AuditCase> cases{
      {"AQ1 |u|^1.5 mu=1.5", [&] { return audit_aq1(with(p15, [](auto& c) { c.mu = 1.5; c.R1 = 1.0; }), s); }, {N}},
      {"AQ1 |u|^3 mu=1.9", [&] { return audit_aq1(with(p3, [](auto& c) { c.mu = 1.9; c.R1 = 1.0; }), s); }, {V}},
      {"AQ1 |u|^1.5 mu=1.4", [&] { return audit_aq1(with(p15, [](auto& c) { c.mu = 1.4; c.R1 = 1.0; }), s); }, {V}},
      {"AQ2 |u|^1.5", [&] { return audit_aq2(with(p15, [](auto& c) { c.c2 = 1.0; c.R2 = 1.0; }), s); }, {N}},
      {"AQ2 |u|^2", [&] { return audit_aq2(with(p2, [](auto& c) { c.c2 = 1.0; c.R2 = 1.0; }), s); }, {I, V}},
      {"AQ2 |u|^4/4", [&] { return audit_aq2(with(p4, [](auto& c) { c.c2 = 1.0; c.R2 = 1.0; }), s); }, {V}},
      {"AQ3 |u|^1.5 d=1", [&] { return audit_aq3(with(p15, [](auto& c) { c.d = 1.0; }), s); }, {N}},
      {"AQ3 log(1+|u|) d=1", [&] { return audit_aq3(with(log1p, [](auto& c) { c.d = 1.0; }), s); }, {V}},
      {"AQ3 |u|^1.5 d=200", [&] { return audit_aq3(with(p15, [](auto& c) { c.d = 200.0; }), s); }, {V}},
  };
  int matched = 0;
  for (const auto& c : cases) {
    const AuditReport r1 = c.run();
    const AuditReport r2 = c.run();
    const bool ok = std::find(c.accepted.begin(), c.accepted.end(), r1.verdict) != c.accepted.end();
    o.require(ok, c.label + " gave " + to_string(r1.verdict));
    o.require(dump_json(to_json(r1)) == dump_json(to_json(r2)), c.label + " not deterministic");
    matched += ok;
  }
  if (o.pass) o.detail = std::to_string(matched) + "/9 verdicts as stated, reports reproducible";
  return o;
}

}  // namespace

int main() {
  report(1, "spectrum oracle", criterion1);
  report(2, "gradient against finite differences", criterion2);
  report(3, "functional value oracle", criterion3);
  report(4, "superquadratic desk experiment", criterion4);
  report(5, "asymptotically quadratic desk experiment", criterion5);
  report(6, "fountain geometry", criterion6);
  report(7, "symmetry and lambda monotonicity", criterion7);
  report(8, "continuation consistency", criterion8);
  report(9, "audit truth table", criterion9);
  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
