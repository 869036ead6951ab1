#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace fountain {

/// A smooth objective on R^m in Euclidean coordinates.
struct Objective {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

enum class Sense { minimize, maximize };
enum class Domain { sphere, ball };

struct SphereOptions {
  int starts = 64;
  int max_iter = 200;
  /// Stop when the projected gradient is below tol * (1 + |grad|).
  double tol = 1e-9;
  std::uint64_t seed = 42;
  Domain domain = Domain::sphere;
  /// Extra starting points, rescaled onto the domain; they run before the
  /// random starts.
  std::vector<Eigen::VectorXd> warm_starts;
  int jobs = 1;
};

/// Best point over all starts plus the data needed to judge reliability.
struct SphereOptimum {
  double value = 0.0;
  Eigen::VectorXd point;
  double median = 0.0;
  int starts = 0;
  int converged = 0;
  /// No start met the stopping rule; `value` is still attained at `point`.
  bool stagnated = false;
};

/// Multistart projected gradient method on {|x| = R} or {|x| <= R}, with
/// Armijo backtracking along the retraction x -> R x / |x|.
SphereOptimum optimize_on_sphere(const Objective& f, int dim, double radius, Sense sense,
                                 const SphereOptions& options);

/// Maximizes a convex objective on {|x| = R} by the fixed-point ascent
/// x <- R g(x) / |g(x)|, which never decreases f. `gradient` may return any
/// subgradient.
SphereOptimum maximize_convex_on_sphere(const Objective& f, int dim, double radius,
                                        const SphereOptions& options);

}  // namespace fountain
