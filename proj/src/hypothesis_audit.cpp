#include "fountain/hypothesis_audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace fountain {

namespace {

constexpr std::size_t kKeptViolations = 16;

// Rounding-level disagreement counts as equality: |m| <= 1e-12 * scale -> 0.
double snap(double margin, double scale) {
  return std::abs(margin) <= 1e-12 * std::abs(scale) ? 0.0 : margin;
}

double norm_of(std::span<const double> u) {
  double s = 0.0;
  for (double x : u) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, const Eigen::VectorXd& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[static_cast<Eigen::Index>(i)];
  return s;
}

double require(const std::optional<double>& v, const char* name, const char* condition) {
  if (!v) throw MissingConstant(std::string(condition) + " requires constant '" + name + "'");
  return *v;
}

std::vector<std::vector<double>> make_directions(const SampleScheme& s, int dim) {
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> dirs;
  const int count = s.direction_count(dim);
  while (static_cast<int>(dirs.size()) < count) {
    std::vector<double> d(dim);
    for (double& x : d) x = normal(rng);
    const double n = norm_of(d);
    if (n < 1e-12) continue;
    for (double& x : d) x /= n;
    dirs.push_back(std::move(d));
  }
  return dirs;
}

struct Sample {
  int shell;
  double r;
  double t;
  std::span<const double> u;
};

template <typename F>
void for_each_sample(const Potential& w, const SampleScheme& s, F&& f) {
  const auto radii = s.radii();
  const auto dirs = make_directions(s, w.dim);
  const std::vector<double> times = s.times.empty() ? std::vector<double>{0.0} : s.times;
  std::vector<double> u(w.dim);
  for (std::size_t k = 0; k < radii.size(); ++k)
    for (const auto& d : dirs)
      for (double t : times) {
        for (int i = 0; i < w.dim; ++i) u[i] = radii[k] * d[i];
        f(Sample{static_cast<int>(k), radii[k], t, u});
      }
}

class MarginTracker {
 public:
  void add(const Sample& s, double margin) {
    ++count_;
    worst_ = std::min(worst_, margin);
    if (margin < 0.0) {
      bad_.push_back({s.t, std::vector<double>(s.u.begin(), s.u.end()), margin});
      if (bad_.size() > 8 * kKeptViolations) trim();
    }
  }
  void add_proxy(AuditSample sample) {
    worst_ = std::min(worst_, sample.margin);
    if (sample.margin < 0.0) bad_.push_back(std::move(sample));
  }
  bool any_violation() const { return !bad_.empty(); }

  void finish(AuditReport& r) {
    trim();
    r.samples_evaluated = count_;
    r.worst_margin = count_ || !bad_.empty() ? worst_ : 0.0;
    r.violations = bad_;
    r.verdict = bad_.empty() ? Verdict::no_violation_found : Verdict::violated;
  }

 private:
  void trim() {
    const auto cmp = [](const AuditSample& a, const AuditSample& b) { return a.margin < b.margin; };
    std::sort(bad_.begin(), bad_.end(), cmp);
    if (bad_.size() > kKeptViolations) bad_.resize(kKeptViolations);
  }

  long count_ = 0;
  double worst_ = std::numeric_limits<double>::infinity();
  std::vector<AuditSample> bad_;
};

bool in_low_window(const SampleScheme& s, double r) {
  return r <= s.r_min * std::pow(10.0, s.window_decades) * (1 + 1e-12);
}

bool in_high_window(const SampleScheme& s, double r) {
  return r >= s.r_max * std::pow(10.0, -s.window_decades) * (1 - 1e-12);
}

struct ShellMin {
  double value = std::numeric_limits<double>::infinity();
  AuditSample where{};
};

// Divergence proxy for W/|u|^2 on a window of shells. `toward_end` is the
// shell the limit approaches (the smallest for |u| -> 0, the largest for
// |u| -> infinity). The proxy margin log(q_end / q_start) is negative when the
// ratio shrinks toward the limit, which contradicts divergence.
struct DivergenceProxy {
  double margin = 0.0;
  bool monotone = true;
  double q_end = 0.0;
  AuditSample where{};
};

DivergenceProxy divergence_proxy(const std::vector<ShellMin>& window) {
  DivergenceProxy p;
  if (window.size() < 2) {
    p.monotone = false;
    return p;
  }
  const auto& start = window.front();
  const auto& end = window.back();
  p.q_end = end.value;
  p.margin = std::log(end.value / start.value);
  if (std::abs(p.margin) <= 1e-9) p.margin = 0.0;
  for (std::size_t i = 1; i < window.size(); ++i)
    if (!(window[i].value > window[i - 1].value)) p.monotone = false;
  p.where = end.where;
  p.where.margin = p.margin;
  return p;
}

std::vector<ShellMin> shell_minima(const Potential& w, const SampleScheme& s,
                                   const std::vector<int>& shells) {
  std::vector<ShellMin> out(s.shells);
  for_each_sample(w, s, [&](const Sample& x) {
    const double q = w.W(x.t, x.u) / (x.r * x.r);
    auto& m = out[x.shell];
    if (q < m.value) m = {q, {x.t, std::vector<double>(x.u.begin(), x.u.end()), 0.0}};
  });
  std::vector<ShellMin> sel;
  for (int k : shells) sel.push_back(out[k]);
  return sel;
}

// Smallest ladder radius beyond which `holds` is true on every sample.
double threshold_radius(const Potential& w, const SampleScheme& s,
                        const std::function<bool(const Sample&)>& holds) {
  std::vector<bool> shell_ok(s.shells, true);
  for_each_sample(w, s, [&](const Sample& x) {
    if (!holds(x)) shell_ok[x.shell] = false;
  });
  const auto radii = s.radii();
  double r = std::numeric_limits<double>::quiet_NaN();
  for (int k = s.shells - 1; k >= 0 && shell_ok[k]; --k) r = radii[k];
  return r;
}

AuditReport make_report(std::string condition, std::map<std::string, double> parameters) {
  AuditReport r;
  r.condition = std::move(condition);
  r.parameters = std::move(parameters);
  return r;
}

}  // namespace

SampleScheme SampleScheme::for_grid(const TimeGrid& grid) {
  SampleScheme s;
  for (int j = 0; j < grid.nodes(); ++j) s.times.push_back(grid.node(j));
  return s;
}

std::vector<double> SampleScheme::radii() const {
  if (!(r_min > 0.0 && r_max > r_min) || shells < 2)
    throw std::invalid_argument("SampleScheme: need 0 < r_min < r_max and at least 2 shells");
  std::vector<double> r(shells);
  const double step = std::log(r_max / r_min) / (shells - 1);
  for (int k = 0; k < shells; ++k) r[k] = r_min * std::exp(step * k);
  r.back() = r_max;
  return r;
}

int SampleScheme::direction_count(int dim) const {
  if (directions > 0) return directions;
  return dim <= 3 ? 32 : 32 * ((dim + 2) / 3);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::no_violation_found: return "no-violation-found";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

AuditReport audit_aq1(const Potential& w, const SampleScheme& s) {
  const double mu = require(w.constants.mu, "mu", "AQ1");
  const double R1 = require(w.constants.R1, "R1", "AQ1");
  if (!(mu > 0.0 && mu < 2.0)) throw std::invalid_argument("AQ1: mu must lie in (0, 2)");
  if (!(R1 > 0.0)) throw std::invalid_argument("AQ1: R1 must be positive");
  AuditReport rep = make_report("AQ1", {{"mu", mu}, {"R1", R1}});
  MarginTracker m;
  for_each_sample(w, s, [&](const Sample& x) {
    const double W = w.W(x.t, x.u);
    double margin = W;
    if (x.r >= R1) {
      const double gu = dot(x.u, w.grad(x.t, x.u));
      margin = std::min(margin, snap(mu * W - gu, std::abs(mu * W) + std::abs(gu)));
    }
    m.add(x, margin);
  });
  m.finish(rep);
  return rep;
}

AuditReport audit_aq2(const Potential& w, const SampleScheme& s) {
  const double c2 = require(w.constants.c2, "c2", "AQ2");
  const double R2 = require(w.constants.R2, "R2", "AQ2");
  AuditReport rep = make_report("AQ2", {{"c2", c2}, {"R2", R2}});
  MarginTracker m;
  for_each_sample(w, s, [&](const Sample& x) {
    if (x.r > R2) return;
    const double W = w.W(x.t, x.u);
    m.add(x, snap(c2 * x.r - W, c2 * x.r + std::abs(W)));
  });
  // |u| -> 0 proxy: walk the low window from its top shell down to r_min.
  const auto radii = s.radii();
  std::vector<int> shells;
  for (int k = s.shells - 1; k >= 0; --k)
    if (in_low_window(s, radii[k])) shells.push_back(k);
  const auto proxy = divergence_proxy(shell_minima(w, s, shells));
  m.add_proxy(proxy.where);
  m.finish(rep);
  rep.diagnostics["ratio_at_r_min"] = proxy.q_end;
  rep.diagnostics["growth_log"] = proxy.margin;
  rep.parameters["threshold"] = s.divergence_threshold;
  if (rep.verdict != Verdict::violated && (!proxy.monotone || proxy.margin <= 0.0 ||
                                           proxy.q_end < s.divergence_threshold)) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "W/|u|^2 does not grow monotonically past the threshold as |u| -> 0";
  }
  return rep;
}

AuditReport audit_aq3(const Potential& w, const SampleScheme& s) {
  const double d = require(w.constants.d, "d", "AQ3");
  if (!(d > 0.0)) throw std::invalid_argument("AQ3: d must be positive");
  AuditReport rep = make_report("AQ3", {{"d", d}});
  MarginTracker m;
  for_each_sample(w, s, [&](const Sample& x) {
    if (!in_high_window(s, x.r)) return;
    const double q = w.W(x.t, x.u) / x.r;
    m.add(x, snap(q - d, std::max(std::abs(q), d)));
  });
  m.finish(rep);
  rep.diagnostics["R3"] = threshold_radius(
      w, s, [&](const Sample& x) { return w.W(x.t, x.u) >= 0.5 * d * x.r; });
  return rep;
}

AuditReport audit_sq1(const Potential& w, const SampleScheme& s) {
  const double a1 = require(w.constants.a1, "a1", "SQ1");
  const double nu = require(w.constants.nu, "nu", "SQ1");
  if (!(a1 > 0.0)) throw std::invalid_argument("SQ1: a1 must be positive");
  if (!(nu > 2.0)) throw std::invalid_argument("SQ1: nu must exceed 2");
  AuditReport rep = make_report("SQ1", {{"a1", a1}, {"nu", nu}});
  MarginTracker m;
  for_each_sample(w, s, [&](const Sample& x) {
    const double bound = a1 * (1.0 + std::pow(x.r, nu - 1.0));
    const double g = w.grad(x.t, x.u).norm();
    m.add(x, snap(bound - g, bound + g));
  });
  m.finish(rep);
  return rep;
}

AuditReport audit_sq2(const Potential& w, const SampleScheme& s) {
  AuditReport rep = make_report("SQ2", {});
  MarginTracker m;
  for_each_sample(w, s, [&](const Sample& x) { m.add(x, w.W(x.t, x.u)); });
  const auto radii = s.radii();
  std::vector<int> shells;
  for (int k = 0; k < s.shells; ++k)
    if (in_high_window(s, radii[k])) shells.push_back(k);
  const auto proxy = divergence_proxy(shell_minima(w, s, shells));
  m.add_proxy(proxy.where);
  m.finish(rep);
  rep.diagnostics["ratio_at_r_max"] = proxy.q_end;
  rep.diagnostics["growth_log"] = proxy.margin;
  rep.parameters["threshold"] = s.divergence_threshold;
  if (rep.verdict != Verdict::violated && (!proxy.monotone || proxy.margin <= 0.0 ||
                                           proxy.q_end < s.divergence_threshold)) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "W/|u|^2 does not grow monotonically past the threshold as |u| -> infinity";
  }
  return rep;
}

AuditReport audit_sq3(const Potential& w, const SampleScheme& s) {
  const double rho = require(w.constants.varrho, "varrho", "SQ3");
  const double b = require(w.constants.b, "b", "SQ3");
  const double nu = require(w.constants.nu, "nu", "SQ3");
  if (!(rho >= 1.0)) throw std::invalid_argument("SQ3: varrho must be at least 1");
  if (!(rho > nu - 2.0)) throw std::invalid_argument("SQ3: varrho must lie in (nu - 2, infinity)");
  if (!(b > 0.0)) throw std::invalid_argument("SQ3: b must be positive");
  AuditReport rep = make_report("SQ3", {{"varrho", rho}, {"b", b}, {"nu", nu}});
  MarginTracker m;
  for_each_sample(w, s, [&](const Sample& x) {
    if (!in_high_window(s, x.r)) return;
    const double W = w.W(x.t, x.u);
    const double gu = dot(x.u, w.grad(x.t, x.u));
    const double q = (gu - 2.0 * W) / std::pow(x.r, rho);
    m.add(x, snap(q - b, std::max(std::abs(q), b)));
  });
  m.finish(rep);
  rep.diagnostics["L0"] = threshold_radius(w, s, [&](const Sample& x) {
    const double W = w.W(x.t, x.u);
    const double gu = dot(x.u, w.grad(x.t, x.u));
    return 0.5 * gu - W >= 0.25 * b * std::pow(x.r, rho);
  });
  return rep;
}

AuditReport audit_even(const Potential& w, const SampleScheme& s) {
  AuditReport rep = make_report("even", {});
  MarginTracker m;
  std::vector<double> neg(w.dim);
  for_each_sample(w, s, [&](const Sample& x) {
    for (int i = 0; i < w.dim; ++i) neg[i] = -x.u[i];
    const double a = w.W(x.t, x.u);
    const double b = w.W(x.t, neg);
    m.add(x, -std::max(0.0, std::abs(a - b) - 1e-12 * (1.0 + std::abs(a))));
  });
  m.finish(rep);
  return rep;
}

AuditReport audit_grad_consistency(const Potential& w, const SampleScheme& s) {
  AuditReport rep = make_report("grad_consistency", {{"rel_tol", 1e-5}});
  MarginTracker m;
  std::vector<double> x(w.dim);
  Eigen::VectorXd fd(w.dim);
  for_each_sample(w, s, [&](const Sample& smp) {
    if (smp.r < 1e-3) return;
    std::copy(smp.u.begin(), smp.u.end(), x.begin());
    const double h = 1e-5 * smp.r;
    for (int i = 0; i < w.dim; ++i) {
      const double xi = x[i];
      x[i] = xi + h;
      const double fp = w.W(smp.t, x);
      x[i] = xi - h;
      const double fm = w.W(smp.t, x);
      x[i] = xi;
      fd[i] = (fp - fm) / (2.0 * h);
    }
    const Eigen::VectorXd g = w.grad(smp.t, smp.u);
    const double err = (fd - g).norm();
    const double tol = 1e-5 * std::max(g.norm(), fd.norm()) +
                       1e-12 * (1.0 + std::abs(w.W(smp.t, smp.u)) / smp.r);
    m.add(smp, -std::max(0.0, err - tol));
  });
  m.finish(rep);
  return rep;
}

std::vector<AuditReport> audit_all(const Potential& w, const SampleScheme& s, GrowthMode mode) {
  std::vector<AuditReport> out;
  out.push_back(audit_even(w, s));
  out.push_back(audit_grad_consistency(w, s));
  if (mode == GrowthMode::asymptotic) {
    out.push_back(audit_aq1(w, s));
    out.push_back(audit_aq2(w, s));
    out.push_back(audit_aq3(w, s));
  } else {
    out.push_back(audit_sq1(w, s));
    out.push_back(audit_sq2(w, s));
    out.push_back(audit_sq3(w, s));
  }
  return out;
}

HypothesisConstants derive_growth_constants(const Potential& w, const SampleScheme& s) {
  HypothesisConstants k = w.constants;
  if (k.mu) {
    double c1 = 0.0;
    for_each_sample(w, s, [&](const Sample& x) {
      c1 = std::max(c1, w.W(x.t, x.u) / (1.0 + std::pow(x.r, *k.mu)));
    });
    k.c1 = c1;
  }
  if (k.a1 && k.nu) {
    double a2 = 0.0;
    for_each_sample(w, s, [&](const Sample& x) {
      a2 = std::max(a2, w.W(x.t, x.u) - *k.a1 * (x.r + std::pow(x.r, *k.nu)));
    });
    k.a2 = a2;
  }
  return k;
}

}  // namespace fountain
