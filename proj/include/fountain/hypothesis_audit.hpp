#pragma once

#include "fountain/potential.hpp"
#include "fountain/time_grid.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fountain {

/// Where the growth conditions are probed: a geometric radius ladder, a fixed
/// set of random unit directions and the grid's time nodes.
struct SampleScheme {
  double r_min = 1e-4;
  double r_max = 1e4;
  int shells = 60;
  int directions = 0;  // 0: 32 for N <= 3, 32 * ceil(N / 3) beyond
  std::vector<double> times;
  std::uint64_t seed = 42;
  /// Smallest acceptable value of W/|u|^2 at the extreme shell for the
  /// divergence proxies of (AQ2) near 0 and (SQ2) at infinity.
  double divergence_threshold = 10.0;
  /// Width (in decades) of the end windows used by limit proxies.
  double window_decades = 3.0;

  static SampleScheme for_grid(const TimeGrid& grid);
  std::vector<double> radii() const;
  int direction_count(int dim) const;
};

enum class Verdict { no_violation_found, violated, inconclusive };

const char* to_string(Verdict v);

struct AuditSample {
  double t;
  std::vector<double> u;
  double margin;
};

/// Outcome of one sampled condition. A negative margin marks a violation;
/// `violations` keeps the worst ones (most negative first), each re-checkable
/// by evaluating W at (t, u).
struct AuditReport {
  std::string condition;
  std::map<std::string, double> parameters;
  long samples_evaluated = 0;
  double worst_margin = 0.0;
  std::vector<AuditSample> violations;
  Verdict verdict = Verdict::inconclusive;
  std::map<std::string, double> diagnostics;
  std::string note;
};

/// A constant required by the condition was not declared.
class MissingConstant : public std::invalid_argument {
 public:
  explicit MissingConstant(const std::string& what) : std::invalid_argument(what) {}
};

AuditReport audit_aq1(const Potential& w, const SampleScheme& scheme);
AuditReport audit_aq2(const Potential& w, const SampleScheme& scheme);
AuditReport audit_aq3(const Potential& w, const SampleScheme& scheme);
AuditReport audit_sq1(const Potential& w, const SampleScheme& scheme);
AuditReport audit_sq2(const Potential& w, const SampleScheme& scheme);
AuditReport audit_sq3(const Potential& w, const SampleScheme& scheme);
AuditReport audit_even(const Potential& w, const SampleScheme& scheme);
AuditReport audit_grad_consistency(const Potential& w, const SampleScheme& scheme);

enum class GrowthMode { asymptotic, superquadratic };

/// Evenness, gradient consistency and the three conditions of the mode.
std::vector<AuditReport> audit_all(const Potential& w, const SampleScheme& scheme, GrowthMode mode);

/// Fills c1 (from mu) and a2 (from a1, nu) as the smallest constants that the
/// samples support. Returns a copy of the declared constants with those set.
HypothesisConstants derive_growth_constants(const Potential& w, const SampleScheme& scheme);

}  // namespace fountain
