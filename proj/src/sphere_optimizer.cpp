#include "fountain/sphere_optimizer.hpp"

#include "fountain/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>
#include <vector>

namespace fountain {

namespace {

struct StartResult {
  double value;
  Eigen::VectorXd point;
  bool converged;
};

std::vector<Eigen::VectorXd> starting_points(int dim, double radius, const SphereOptions& o) {
  std::vector<Eigen::VectorXd> pts;
  for (const auto& w : o.warm_starts) {
    if (w.size() != dim) throw std::invalid_argument("warm start has wrong dimension");
    const double n = w.norm();
    if (n > 0.0) pts.push_back(o.domain == Domain::ball && n <= radius ? w : Eigen::VectorXd(radius * w / n));
  }
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int s = 0; s < o.starts; ++s) {
    Eigen::VectorXd x(dim);
    do {
      for (int i = 0; i < dim; ++i) x[i] = normal(rng);
    } while (x.norm() == 0.0);
    double r = radius;
    if (o.domain == Domain::ball) r *= std::pow(uniform(rng), 1.0 / dim);
    pts.push_back(r * x / x.norm());
  }
  return pts;
}

Eigen::VectorXd project(const Eigen::VectorXd& y, double radius, Domain domain) {
  const double n = y.norm();
  if (domain == Domain::ball && n <= radius) return y;
  return radius * y / n;
}

StartResult descend(const Objective& f, double sign, Eigen::VectorXd x, double radius,
                    const SphereOptions& o) {
  const auto h = [&](const Eigen::VectorXd& v) { return sign * f.value(v); };
  const auto dh = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return sign * f.gradient(v); };
  double fx = h(x);
  Eigen::VectorXd g = dh(x);
  Eigen::VectorXd best_x = x;
  double best_f = fx;
  // Barzilai-Borwein steps with a nonmonotone Armijo test against the worst
  // of the last few values.
  constexpr int kMemory = 10;
  // Value stationarity for objectives whose curvature blows up (|u|^p with
  // p < 2 near nodal points), where the gradient test converges too slowly.
  constexpr int kWindow = 20;
  std::deque<double> recent{fx};
  std::vector<double> best_history;
  Eigen::VectorXd x_prev, d_prev;
  bool converged = false;
  for (int it = 0; it < o.max_iter; ++it) {
    best_history.push_back(best_f);
    if (it >= kWindow && std::abs(best_history[it - kWindow] - best_f) <= 1e-12 * std::abs(best_f)) {
      converged = true;
      break;
    }
    const bool on_boundary = x.norm() >= radius * (1.0 - 1e-12);
    Eigen::VectorXd d = g;
    if (o.domain == Domain::sphere || (on_boundary && g.dot(x) < 0.0))
      d -= (g.dot(x) / x.squaredNorm()) * x;
    const double dn = d.norm();
    if (dn <= o.tol * (1.0 + g.norm())) {
      converged = true;
      break;
    }
    double step = 0.1 * radius / dn;
    if (x_prev.size() > 0) {
      const Eigen::VectorXd s = x - x_prev;
      const double sy = s.dot(d - d_prev);
      if (sy > 0.0) step = std::min(s.squaredNorm() / sy, 2.0 * radius / dn);
    }
    const double f_ref = *std::max_element(recent.begin(), recent.end());
    bool accepted = false;
    while (step * dn > 1e-16 * radius) {
      const Eigen::VectorXd y = project(x - step * d, radius, o.domain);
      const double decrease = g.dot(y - x);
      const double fy = h(y);
      if (decrease < 0.0 && std::isfinite(fy) && fy <= f_ref + 1e-4 * decrease) {
        x_prev = x;
        d_prev = d;
        x = y;
        fx = fy;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No descent at round-off step length: stationary to working precision.
      converged = true;
      break;
    }
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
    recent.push_back(fx);
    if (static_cast<int>(recent.size()) > kMemory) recent.pop_front();
    g = dh(x);
  }
  return {sign * best_f, std::move(best_x), converged};
}

StartResult ascend_convex(const Objective& f, Eigen::VectorXd x, double radius, const SphereOptions& o) {
  double fx = f.value(x);
  bool converged = false;
  for (int it = 0; it < o.max_iter; ++it) {
    const Eigen::VectorXd g = f.gradient(x);
    const double gn = g.norm();
    if (gn == 0.0) {
      converged = true;
      break;
    }
    const Eigen::VectorXd y = radius * g / gn;
    const double fy = f.value(y);
    if (!(fy > fx * (1.0 + 1e-15))) {
      if (fy > fx) {
        x = y;
        fx = fy;
      }
      converged = true;
      break;
    }
    x = y;
    fx = fy;
  }
  return {fx, std::move(x), converged};
}

SphereOptimum reduce(std::vector<StartResult>& results, Sense sense) {
  if (results.empty()) throw std::invalid_argument("sphere optimizer needs at least one start");
  SphereOptimum best;
  best.starts = static_cast<int>(results.size());
  std::vector<double> values;
  int best_index = 0;
  for (int i = 0; i < best.starts; ++i) {
    const auto& r = results[i];
    values.push_back(r.value);
    best.converged += r.converged ? 1 : 0;
    const bool better = sense == Sense::minimize ? r.value < results[best_index].value
                                                 : r.value > results[best_index].value;
    if (better) best_index = i;
  }
  best.value = results[best_index].value;
  best.point = results[best_index].point;
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  best.median = m % 2 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
  best.stagnated = best.converged == 0;
  return best;
}

void check(int dim, double radius) {
  if (dim < 1) throw std::invalid_argument("sphere optimizer: dimension must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("sphere optimizer: radius must be positive");
}

}  // namespace

SphereOptimum optimize_on_sphere(const Objective& f, int dim, double radius, Sense sense,
                                 const SphereOptions& options) {
  check(dim, radius);
  const auto starts = starting_points(dim, radius, options);
  std::vector<StartResult> results(starts.size());
  const double sign = sense == Sense::minimize ? 1.0 : -1.0;
  parallel_for(static_cast<int>(starts.size()), options.jobs,
               [&](int i) { results[i] = descend(f, sign, starts[i], radius, options); });
  return reduce(results, sense);
}

SphereOptimum maximize_convex_on_sphere(const Objective& f, int dim, double radius,
                                        const SphereOptions& options) {
  check(dim, radius);
  SphereOptions o = options;
  o.domain = Domain::sphere;
  const auto starts = starting_points(dim, radius, o);
  std::vector<StartResult> results(starts.size());
  parallel_for(static_cast<int>(starts.size()), options.jobs,
               [&](int i) { results[i] = ascend_convex(f, starts[i], radius, o); });
  return reduce(results, Sense::maximize);
}

}  // namespace fountain
