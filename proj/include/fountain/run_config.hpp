#pragma once

#include "fountain/fountain_geometry.hpp"
#include "fountain/hypothesis_audit.hpp"
#include "fountain/minimax_solver.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fountain {

/// Every problem found while reading a configuration, not just the first.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

struct ProblemBlock {
  double period = 0.0;
  int dim = 1;
  int nodes = 64;
  /// zero | constant | diagonal | expression
  std::string U = "zero";
  double omega2 = 0.0;
  /// One expression in t per diagonal entry.
  std::vector<std::string> U_diagonal;
  /// Scalar expression in t; U(t) = f(t) I.
  std::string U_expression;
  std::optional<double> zero_tol;
  GrowthMode mode = GrowthMode::superquadratic;
};

struct PotentialBlock {
  /// builtin | expression
  std::string kind = "builtin";
  /// power | modulated_power | zero
  std::string builtin = "power";
  double coefficient = 1.0;
  double exponent = 4.0;
  std::string W;
  std::vector<std::string> gradW;
  bool even = false;
};

struct GeometryBlock {
  /// 0 selects n-bar + 1 and n-bar + 15.
  int k_min = 0;
  int k_max = 0;
  std::vector<double> lambdas{1.0, 2.0};
  GeometryOptions options;
};

struct ValidationBlock {
  bool oracle = true;
  int oracle_j_max = 3;
  double oracle_tol = 1e-12;
  /// Refinement grid; 0 skips refinement.
  int refine_nodes = 0;
  /// Galerkin level on the refined grid; 0 is the full space.
  int refine_k = 0;
  double refine_flag_tol = 1e-6;
};

struct OutputBlock {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
};

struct RunConfig {
  ProblemBlock problem;
  PotentialBlock potential;
  /// Declared constants; they override the ones a built-in pre-declares.
  HypothesisConstants constants;
  SolverConfig solver;
  /// Continue every lambda = lambda_schedule[0] point down to 1.
  bool continuation = true;
  /// Derive start radii from the geometry of Y_k: a geometric ladder from
  /// 0.01 r_k to 10 rho_k (asymptotic) or from rho_k to r_k (superquadratic).
  bool auto_radii = true;
  GeometryBlock geometry;
  SampleScheme audit;
  ValidationBlock validation;
  OutputBlock output;
  std::uint64_t seed = 42;
  std::string text;

  TimeGrid grid() const;
  MatrixPath coefficient_path() const;
  /// The potential with declared constants merged in.
  Potential build_potential() const;
  FunctionalContext context() const;
  /// The audit scheme with the grid's time nodes.
  SampleScheme audit_scheme() const;
  void set_seed(std::uint64_t s);
  void set_jobs(int jobs);
};

/// INI text with sections [problem], [potential], [hypotheses], [solver],
/// [geometry], [audit], [validation], [output] and a top-level seed.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace fountain
