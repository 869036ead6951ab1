#include "fountain/run_config.hpp"

#include "fountain/expression.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fountain {

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string s = "invalid configuration:";
  for (const auto& e : errors) s += "\n  " + e;
  return s;
}

using Setter = std::function<void(const std::string&)>;

int to_int(const std::string& s) {
  int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw std::invalid_argument("expected a nonnegative integer, got '" + s + "'");
  return v;
}

double to_double(const std::string& s) {
  try {
    return parse_number(s);
  } catch (const std::exception& e) {
    throw std::invalid_argument("expected a number, got '" + s + "' (" + e.what() + ")");
  }
}

bool to_bool(const std::string& s) {
  const std::string v = boost::algorithm::to_lower_copy(s);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::vector<std::string> to_list(const std::string& s) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, s, boost::is_any_of(","));
  for (auto& p : parts) boost::algorithm::trim(p);
  if (parts.size() == 1 && parts[0].empty()) parts.clear();
  return parts;
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> v;
  for (const auto& p : to_list(s)) v.push_back(to_double(p));
  return v;
}

GrowthMode to_mode(const std::string& s) {
  if (s == "asymptotic" || s == "aq") return GrowthMode::asymptotic;
  if (s == "superquadratic" || s == "sq") return GrowthMode::superquadratic;
  throw std::invalid_argument("mode must be asymptotic or superquadratic, got '" + s + "'");
}

std::string one_of(const std::string& s, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (s == a) return s;
  std::string msg = "expected one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw std::invalid_argument(msg + ", got '" + s + "'");
}

using Table = std::map<std::string, std::map<std::string, Setter>>;

Table make_table(RunConfig& c) {
  auto& P = c.problem;
  auto& W = c.potential;
  auto& H = c.constants;
  auto& S = c.solver;
  auto& G = c.geometry;
  auto& A = c.audit;
  auto& V = c.validation;
  auto& O = c.output;
  const auto opt = [](std::optional<double>& field) { return [&field](const std::string& v) { field = to_double(v); }; };
  Table t;
  t[""] = {{"seed", [&](const std::string& v) { c.seed = to_u64(v); }}};
  t["problem"] = {
      {"period", [&](const std::string& v) { P.period = to_double(v); }},
      {"dim", [&](const std::string& v) { P.dim = to_int(v); }},
      {"nodes", [&](const std::string& v) { P.nodes = to_int(v); }},
      {"U", [&](const std::string& v) { P.U = one_of(v, {"zero", "constant", "diagonal", "expression"}); }},
      {"omega2", [&](const std::string& v) { P.omega2 = to_double(v); }},
      {"U_diagonal", [&](const std::string& v) { P.U_diagonal = to_list(v); }},
      {"U_expression", [&](const std::string& v) { P.U_expression = v; }},
      {"zero_tol", opt(P.zero_tol)},
      {"mode", [&](const std::string& v) { P.mode = to_mode(v); }},
  };
  t["potential"] = {
      {"kind", [&](const std::string& v) { W.kind = one_of(v, {"builtin", "expression"}); }},
      {"builtin", [&](const std::string& v) { W.builtin = one_of(v, {"power", "modulated_power", "zero"}); }},
      {"coefficient", [&](const std::string& v) { W.coefficient = to_double(v); }},
      {"exponent", [&](const std::string& v) { W.exponent = to_double(v); }},
      {"W", [&](const std::string& v) { W.W = v; }},
      {"gradW", [&](const std::string& v) { W.gradW = to_list(v); }},
      {"even", [&](const std::string& v) { W.even = to_bool(v); }},
  };
  t["hypotheses"] = {{"mu", opt(H.mu)}, {"R1", opt(H.R1)},         {"c2", opt(H.c2)}, {"R2", opt(H.R2)},
                     {"d", opt(H.d)},   {"a1", opt(H.a1)},         {"nu", opt(H.nu)}, {"varrho", opt(H.varrho)},
                     {"b", opt(H.b)},   {"c1", opt(H.c1)},         {"a2", opt(H.a2)}};
  t["solver"] = {
      {"k", [&](const std::string& v) { S.k = to_int(v); }},
      {"lambda_schedule", [&](const std::string& v) { S.lambda_schedule = to_doubles(v); }},
      {"starts", [&](const std::string& v) { S.starts = to_int(v); }},
      {"start_radii",
       [&](const std::string& v) {
         c.auto_radii = v == "auto";
         if (!c.auto_radii) S.start_radii = to_doubles(v);
       }},
      {"mode_starts", [&](const std::string& v) { S.mode_starts = to_bool(v); }},
      {"tol_g", [&](const std::string& v) { S.tol_g = to_double(v); }},
      {"max_iter", [&](const std::string& v) { S.max_iter = to_int(v); }},
      {"deflation_distance", [&](const std::string& v) { S.deflation_distance = to_double(v); }},
      {"trust_factor", [&](const std::string& v) { S.trust_factor = to_double(v); }},
      {"continuation", [&](const std::string& v) { c.continuation = to_bool(v); }},
  };
  t["geometry"] = {
      {"k_min", [&](const std::string& v) { G.k_min = to_int(v); }},
      {"k_max", [&](const std::string& v) { G.k_max = to_int(v); }},
      {"lambdas", [&](const std::string& v) { G.lambdas = to_doubles(v); }},
      {"starts", [&](const std::string& v) { G.options.starts = to_int(v); }},
      {"max_iter", [&](const std::string& v) { G.options.max_iter = to_int(v); }},
      {"rho_constant", [&](const std::string& v) { G.options.rho_constant = to_double(v); }},
      {"eps_samples", [&](const std::string& v) { G.options.eps_samples = to_int(v); }},
  };
  t["audit"] = {
      {"r_min", [&](const std::string& v) { A.r_min = to_double(v); }},
      {"r_max", [&](const std::string& v) { A.r_max = to_double(v); }},
      {"shells", [&](const std::string& v) { A.shells = to_int(v); }},
      {"directions", [&](const std::string& v) { A.directions = to_int(v); }},
      {"divergence_threshold", [&](const std::string& v) { A.divergence_threshold = to_double(v); }},
      {"window_decades", [&](const std::string& v) { A.window_decades = to_double(v); }},
  };
  t["validation"] = {
      {"oracle", [&](const std::string& v) { V.oracle = to_bool(v); }},
      {"oracle_j_max", [&](const std::string& v) { V.oracle_j_max = to_int(v); }},
      {"oracle_tol", [&](const std::string& v) { V.oracle_tol = to_double(v); }},
      {"refine_nodes", [&](const std::string& v) { V.refine_nodes = to_int(v); }},
      {"refine_k", [&](const std::string& v) { V.refine_k = to_int(v); }},
      {"refine_flag_tol", [&](const std::string& v) { V.refine_flag_tol = to_double(v); }},
  };
  t["output"] = {
      {"directory", [&](const std::string& v) { O.directory = v; }},
      {"formats",
       [&](const std::string& v) {
         O.csv = O.json = false;
         for (const auto& f : to_list(v)) {
           if (one_of(f, {"csv", "json"}) == "csv") O.csv = true;
           else O.json = true;
         }
       }},
  };
  return t;
}

void require(std::vector<std::string>& errors, bool ok, const std::string& msg) {
  if (!ok) errors.push_back(msg);
}

void check_constants(const HypothesisConstants& k, GrowthMode mode, std::vector<std::string>& errors) {
  const auto need = [&](const std::optional<double>& v, const char* name) {
    if (!v) errors.push_back(std::string("hypotheses.") + name + ": required in " +
                             (mode == GrowthMode::asymptotic ? "asymptotic" : "superquadratic") + " mode");
    return v.has_value();
  };
  if (mode == GrowthMode::asymptotic) {
    if (need(k.mu, "mu")) require(errors, *k.mu > 0.0 && *k.mu < 2.0, "hypotheses.mu: must lie in (0, 2)");
    if (need(k.R1, "R1")) require(errors, *k.R1 > 0.0, "hypotheses.R1: must be positive");
    if (need(k.c2, "c2")) require(errors, *k.c2 > 0.0, "hypotheses.c2: must be positive");
    if (need(k.R2, "R2")) require(errors, *k.R2 > 0.0, "hypotheses.R2: must be positive");
    if (need(k.d, "d")) require(errors, *k.d > 0.0, "hypotheses.d: must be positive");
  } else {
    if (need(k.a1, "a1")) require(errors, *k.a1 > 0.0, "hypotheses.a1: must be positive");
    const bool has_nu = need(k.nu, "nu");
    if (has_nu) require(errors, *k.nu > 2.0, "hypotheses.nu: nu must exceed 2");
    if (need(k.varrho, "varrho")) {
      require(errors, *k.varrho >= 1.0, "hypotheses.varrho: must be at least 1");
      if (has_nu)
        require(errors, *k.varrho > *k.nu - 2.0, "hypotheses.varrho: must lie in (nu - 2, infinity)");
    }
    if (need(k.b, "b")) require(errors, *k.b > 0.0, "hypotheses.b: must be positive");
  }
}

void merge(std::optional<double>& into, const std::optional<double>& from) {
  if (from) into = from;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::invalid_argument(join_errors(errors)), errors_(std::move(errors)) {}

TimeGrid RunConfig::grid() const { return TimeGrid(problem.period, problem.nodes, problem.dim); }

MatrixPath RunConfig::coefficient_path() const {
  const TimeGrid g = grid();
  const int N = problem.dim;
  const double T = problem.period;
  if (problem.U == "zero") return MatrixPath::zero(g);
  if (problem.U == "constant") return MatrixPath::constant(g, problem.omega2);
  if (problem.U == "expression") {
    const Expression f = Expression::parse(problem.U_expression, 0);
    return MatrixPath::sample(g, [&](double t) -> Eigen::MatrixXd {
      return f.eval(t, {}, T) * Eigen::MatrixXd::Identity(N, N);
    });
  }
  std::vector<Expression> diag;
  for (const auto& s : problem.U_diagonal) diag.push_back(Expression::parse(s, 0));
  return MatrixPath::sample(g, [&](double t) -> Eigen::MatrixXd {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) m(i, i) = diag[i].eval(t, {}, T);
    return m;
  });
}

Potential RunConfig::build_potential() const {
  const auto& p = potential;
  Potential w;
  if (p.kind == "expression") w = expression_potential(p.W, p.gradW, problem.dim, problem.period, p.even);
  else if (p.builtin == "power") w = power_potential(p.coefficient, p.exponent, problem.dim);
  else if (p.builtin == "modulated_power")
    w = modulated_power_potential(p.coefficient, p.exponent, problem.dim, problem.period);
  else w = zero_potential(problem.dim);
  auto& k = w.constants;
  const auto& d = constants;
  for (auto [into, from] : {std::pair{&k.mu, &d.mu}, {&k.R1, &d.R1}, {&k.c2, &d.c2}, {&k.R2, &d.R2},
                            {&k.d, &d.d}, {&k.a1, &d.a1}, {&k.nu, &d.nu}, {&k.varrho, &d.varrho},
                            {&k.b, &d.b}, {&k.c1, &d.c1}, {&k.a2, &d.a2}})
    merge(*into, *from);
  return w;
}

FunctionalContext RunConfig::context() const {
  const TimeGrid g = grid();
  return FunctionalContext(g, coefficient_path(), build_potential(), problem.zero_tol);
}

SampleScheme RunConfig::audit_scheme() const {
  SampleScheme s = audit;
  s.times.clear();
  const TimeGrid g = grid();
  for (int j = 0; j < g.nodes(); ++j) s.times.push_back(g.node(j));
  s.seed = seed;
  return s;
}

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  solver.seed = s;
  geometry.options.seed = s;
  geometry.options.scheme.seed = s;
  audit.seed = s;
}

void RunConfig::set_jobs(int jobs) {
  solver.jobs = jobs;
  geometry.options.jobs = jobs;
}

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({"line " + std::to_string(e.line()) + ": " + e.message()});
  }
  RunConfig c;
  c.text = text;
  c.problem.period = 0.0;
  std::vector<std::string> errors;
  const Table table = make_table(c);
  bool has_period = false;
  for (const auto& [name, node] : tree) {
    const bool is_section = !node.empty();
    if (!is_section && node.data().empty() && !name.empty() && table.count(name)) continue;
    const std::string section = is_section ? name : "";
    const auto sec = table.find(section);
    if (sec == table.end()) {
      errors.push_back("unknown section [" + name + "]");
      continue;
    }
    const auto apply = [&](const std::string& key, const std::string& raw) {
      const std::string where = section.empty() ? key : section + "." + key;
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) {
        errors.push_back(where + ": unknown key");
        return;
      }
      try {
        it->second(boost::algorithm::trim_copy(raw));
        if (where == "problem.period") has_period = true;
      } catch (const std::exception& e) {
        errors.push_back(where + ": " + e.what());
      }
    };
    if (is_section) {
      for (const auto& [key, leaf] : node) apply(key, leaf.data());
    } else {
      apply(name, node.data());
    }
  }

  const auto& P = c.problem;
  require(errors, has_period, "problem.period: required");
  if (has_period) require(errors, std::isfinite(P.period) && P.period > 0.0, "problem.period: must be positive");
  require(errors, P.dim >= 1, "problem.dim: must be positive");
  require(errors, P.nodes >= 4 && P.nodes % 2 == 0, "problem.nodes: must be even and at least 4");
  if (P.U == "diagonal")
    require(errors, static_cast<int>(P.U_diagonal.size()) == P.dim,
            "problem.U_diagonal: needs one expression per component");
  if (P.U == "expression") require(errors, !P.U_expression.empty(), "problem.U_expression: required when U = expression");
  const auto check_time_expr = [&](const std::string& s, const std::string& where) {
    try {
      const Expression e = Expression::parse(s, 0);
      (void)e;
    } catch (const std::exception& ex) {
      errors.push_back(where + ": " + ex.what());
    }
  };
  if (P.U == "expression" && !P.U_expression.empty()) check_time_expr(P.U_expression, "problem.U_expression");
  if (P.U == "diagonal")
    for (const auto& s : P.U_diagonal) check_time_expr(s, "problem.U_diagonal");

  const auto& W = c.potential;
  if (W.kind == "expression") {
    require(errors, !W.W.empty(), "potential.W: required when kind = expression");
    const auto check_state_expr = [&](const std::string& s, const std::string& where) {
      try {
        (void)Expression::parse(s, P.dim);
      } catch (const std::exception& ex) {
        errors.push_back(where + ": " + ex.what());
      }
    };
    if (!W.W.empty()) check_state_expr(W.W, "potential.W");
    if (!W.gradW.empty()) {
      require(errors, static_cast<int>(W.gradW.size()) == P.dim, "potential.gradW: needs one expression per component");
      for (const auto& s : W.gradW) check_state_expr(s, "potential.gradW");
    }
  } else if (W.builtin != "zero") {
    require(errors, W.exponent > 1.0, "potential.exponent: must exceed 1");
  }

  if (errors.empty()) {
    try {
      check_constants(c.build_potential().constants, P.mode, errors);
    } catch (const std::exception& e) {
      errors.push_back(std::string("potential: ") + e.what());
    }
  }
  try {
    c.solver.validate();
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
  c.solver.mode = P.mode;
  require(errors, c.solver.k <= P.nodes * P.dim, "solver.k: exceeds the discrete dimension nodes * dim");
  const auto& G = c.geometry;
  require(errors, G.k_min >= 0 && G.k_max >= 0, "geometry: k range must be nonnegative");
  require(errors, G.k_min == 0 || G.k_max == 0 || G.k_min <= G.k_max, "geometry: k_min exceeds k_max");
  require(errors, !G.lambdas.empty(), "geometry.lambdas: empty");
  require(errors, G.options.starts >= 1, "geometry.starts: must be positive");
  require(errors, G.options.max_iter >= 1, "geometry.max_iter: must be positive");
  const auto& A = c.audit;
  require(errors, A.r_min > 0.0 && A.r_max > A.r_min, "audit: need 0 < r_min < r_max");
  require(errors, A.shells >= 2, "audit.shells: at least 2");
  require(errors, A.directions >= 0, "audit.directions: must be nonnegative");
  const auto& V = c.validation;
  require(errors, V.oracle_j_max >= 1, "validation.oracle_j_max: must be positive");
  require(errors, V.oracle_tol > 0.0, "validation.oracle_tol: must be positive");
  require(errors, V.refine_nodes == 0 || (V.refine_nodes >= P.nodes && V.refine_nodes % 2 == 0),
          "validation.refine_nodes: must be 0 or an even count of at least problem.nodes");
  require(errors, V.refine_k >= 0, "validation.refine_k: must be nonnegative");
  if (!errors.empty()) throw ConfigError(std::move(errors));
  c.set_seed(c.seed);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open '" + path + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace fountain
