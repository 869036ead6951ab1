#include "fountain/pipeline.hpp"

#include "fountain/format.hpp"
#include "fountain/fourier.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <type_traits>

namespace fountain {

std::optional<Command> parse_command(const std::string& s) {
  static const std::map<std::string, Command> names{{"spectrum", Command::spectrum}, {"audit", Command::audit},
                                                    {"geometry", Command::geometry}, {"solve", Command::solve},
                                                    {"validate", Command::validate}, {"all", Command::all}};
  const auto it = names.find(s);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

const char* to_string(Command c) {
  switch (c) {
    case Command::spectrum: return "spectrum";
    case Command::audit: return "audit";
    case Command::geometry: return "geometry";
    case Command::solve: return "solve";
    case Command::validate: return "validate";
    case Command::all: return "all";
  }
  return "?";
}

namespace {

constexpr const char* kVersion = "0.1.0";

std::string resolve_out(const RunOptions& o, const std::string& configured) {
  if (o.out) return *o.out;
  if (const char* env = std::getenv("FOUNTAIN_OUT_DIR"); env && *env) return env;
  return configured;
}

void write_error(const std::string& dir, const RunOptions& o, const std::string& kind, const std::string& message,
                 const std::vector<std::string>& details, std::ostream& log) {
  log << "error: " << message << '\n';
  try {
    ArtifactWriter w(dir);
    Json j{{"command", to_string(o.command)}, {"error", kind}, {"message", message}, {"details", details}};
    w.write("error.json", dump_json(j) + "\n");
  } catch (const std::exception& e) {
    log << "error: could not write error.json: " << e.what() << '\n';
  }
}

bool oracle_applicable(const FunctionalContext& ctx) {
  const auto& w = ctx.potential();
  return ctx.grid().dim() == 1 && w.autonomous && w.even && ctx.path().is_constant();
}

// Index of the strongest nonconstant harmonic, which is j for an orbit of
// minimal period T/j.
int dominant_harmonic(const GridFunction& u) {
  const auto e = fourier::harmonic_energy(u);
  int best = 1;
  for (std::size_t h = 1; h < e.size(); ++h)
    if (e[h] > e[best]) best = static_cast<int>(h);
  return best;
}

std::vector<double> geometric_ladder(double lo, double hi, int n) {
  std::vector<double> r;
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) return r;
  for (int i = 0; i < n; ++i) r.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return r;
}

class Session {
 public:
  Session(const RunOptions& o, const RunConfig& c, std::ostream& log)
      : opt_(o), cfg_(c), log_(log), writer_(resolve_out(o, c.output.directory)), ctx_(c.context()) {}

  int execute() {
    const Command c = opt_.command;
    int code = exit_code::ok;
    if (c == Command::spectrum || c == Command::all) spectrum();
    const bool wants_audit = c == Command::audit || c == Command::all || opt_.gate_on_audit;
    if (wants_audit) {
      const bool violated = audit();
      if (violated && (c == Command::audit || opt_.gate_on_audit)) code = exit_code::audit_violation;
      if (violated && opt_.gate_on_audit && c != Command::audit) {
        log_ << "audit found a violation; stopping (--gate-on-audit)\n";
        manifest(code);
        return code;
      }
    }
    if (c == Command::geometry || c == Command::all) geometry();
    if (c == Command::solve || c == Command::validate || c == Command::all) solve();
    if (c == Command::validate || c == Command::all) validate();
    manifest(code);
    return code;
  }

 private:
  template <typename F>
  auto timed(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      times_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    } else {
      auto r = f();
      times_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return r;
    }
  }

  void spectrum() {
    timed("spectrum", [&] {
      const auto& dec = ctx_.spectrum();
      if (cfg_.output.csv) {
        std::ostringstream os;
        write_spectrum_csv(os, dec);
        writer_.write("spectrum.csv", os.str());
      }
      summary_["spectrum"] = {{"n_minus", dec.n_minus()}, {"n_zero", dec.n_zero()}, {"n_plus", dec.n_plus()},
                              {"zero_tol", dec.zero_tol()}};
      log_ << "spectrum: n- = " << dec.n_minus() << ", n0 = " << dec.n_zero() << ", n+ = " << dec.n_plus() << '\n';
    });
  }

  bool audit() {
    return timed("audit", [&] {
      const auto reports = audit_all(ctx_.potential(), cfg_.audit_scheme(), cfg_.problem.mode);
      bool violated = false;
      Json list = Json::array();
      for (const auto& r : reports) {
        violated = violated || r.verdict == Verdict::violated;
        list.push_back(to_json(r));
        log_ << "audit " << r.condition << ": " << to_string(r.verdict) << '\n';
      }
      Json j{{"potential", ctx_.potential().name},
             {"mode", cfg_.problem.mode == GrowthMode::asymptotic ? "asymptotic" : "superquadratic"},
             {"violated", violated},
             {"reports", list}};
      if (cfg_.output.json) writer_.write("audit.json", dump_json(j) + "\n");
      summary_["audit_violated"] = violated;
      return violated;
    });
  }

  std::pair<int, int> k_range() const {
    const int nbar = ctx_.spectrum().n_bar();
    const int kmax_possible = ctx_.spectrum().size();
    const int lo = cfg_.geometry.k_min > 0 ? cfg_.geometry.k_min : nbar + 1;
    const int hi = std::min(cfg_.geometry.k_max > 0 ? cfg_.geometry.k_max : nbar + 15, kmax_possible);
    return {lo, hi};
  }

  void geometry() {
    timed("geometry", [&] {
      const auto [lo, hi] = k_range();
      const auto table = geometry_table(ctx_, lo, hi, cfg_.geometry.lambdas, cfg_.problem.mode, geometry_options());
      if (cfg_.output.csv) {
        std::ostringstream os;
        write_geometry_csv(os, table);
        writer_.write("geometry.csv", os.str());
      }
      const bool aq = cfg_.problem.mode == GrowthMode::asymptotic;
      const int level = first_stable_level(table, aq ? "rho_below_bound" : "rho_above_floor");
      summary_["geometry"] = {{"k_min", lo}, {"k_max", hi}, {aq ? "k1" : "k2", level}};
      log_ << "geometry: k = " << lo << ".." << hi << ", first stable level " << level << '\n';
    });
  }

  GeometryOptions geometry_options() const {
    GeometryOptions o = cfg_.geometry.options;
    o.jobs = opt_.jobs;
    return o;
  }

  // Geometry at the solver's level for lambda = 1 and 2; empty when the
  // level is not above n-bar or constants are missing.
  const std::vector<GeometryReport>& level_geometry() {
    if (!level_geometry_) {
      level_geometry_.emplace();
      const int k = cfg_.solver.k;
      if (k > ctx_.spectrum().n_bar()) {
        try {
          *level_geometry_ = geometry_table(ctx_, k, k, {1.0, 2.0}, cfg_.problem.mode, geometry_options());
        } catch (const MissingConstant& e) {
          log_ << "solve: no geometry at level " << k << " (" << e.what() << ")\n";
        }
      }
    }
    return *level_geometry_;
  }

  SolverConfig solver_config() {
    SolverConfig sc = cfg_.solver;
    sc.jobs = opt_.jobs;
    sc.mode = cfg_.problem.mode;
    if (cfg_.auto_radii) {
      const auto& g = level_geometry();
      std::vector<double> radii;
      if (!g.empty()) {
        radii = sc.mode == GrowthMode::asymptotic ? geometric_ladder(0.01 * g[0].r, 10.0 * g[0].rho, 5)
                                                  : geometric_ladder(g[0].rho, g[0].r, 5);
      }
      if (radii.empty()) log_ << "solve: start radii fall back to the configured defaults\n";
      else sc.start_radii = radii;
    }
    return sc;
  }

  void solve() {
    timed("solve", [&] {
      const SolverConfig sc = solver_config();
      set_ = multistart_collect(ctx_, 1.0, sc.k, sc);
      log_ << "solve: " << set_->points.size() << " distinct pairs from " << set_->starts << " starts ("
           << set_->failures << " failed, " << set_->trivial << " trivial)\n";
      std::string lines;
      for (std::size_t i = 0; i < set_->points.size(); ++i) {
        Json j = to_json(set_->points[i]);
        j["kind"] = "solution";
        j["index"] = i;
        lines += dump_json(j, -1) + "\n";
      }
      if (cfg_.continuation && sc.lambda_schedule.size() > 1) {
        const CriticalSet head = multistart_collect(ctx_, sc.lambda_schedule.front(), sc.k, sc);
        const auto& geo = level_geometry();
        for (std::size_t i = 0; i < head.points.size(); ++i) {
          const Branch b = continue_branch(ctx_, head.points[i], sc);
          Json j = to_json(b);
          j["kind"] = "branch";
          j["index"] = i;
          j["boundedness"] = to_json(boundedness_diagnostics(b, sc.mode, ctx_.potential().constants));
          if (sc.mode == GrowthMode::asymptotic && geo.size() == 2 && b.status == BranchStatus::converged) {
            const double lower = geo[1].xi_hat;
            const double upper = geo[0].beta_hat;
            j["bracket"] = {{"lower", lower}, {"upper", upper}, {"inside", value_in_bracket(b, lower, upper)}};
          }
          lines += dump_json(j, -1) + "\n";
          branches_.push_back(b);
        }
        log_ << "solve: " << branches_.size() << " branches continued from lambda = " << sc.lambda_schedule.front()
             << '\n';
      }
      if (cfg_.output.json) writer_.write("solutions.jsonl", lines);
      summary_["solutions"] = {{"distinct_pairs", set_->points.size()}, {"starts", set_->starts},
                               {"failures", set_->failures}, {"branches", branches_.size()}};
    });
  }

  const OracleOrbit* oracle(int j, const TimeGrid& grid) {
    const auto key = std::make_pair(j, grid.nodes());
    if (auto it = oracles_.find(key); it != oracles_.end()) return it->second ? &*it->second : nullptr;
    std::optional<OracleOrbit> orbit;
    try {
      orbit = oracle_shooting(ctx_.potential(), ctx_.path().at(0)(0, 0), grid, j, cfg_.validation.oracle_tol);
    } catch (const OracleFailure& e) {
      log_ << "validate: oracle j = " << j << " unavailable: " << e.what() << '\n';
    }
    auto& slot = oracles_[key] = std::move(orbit);
    return slot ? &*slot : nullptr;
  }

  void validate() {
    timed("validate", [&] {
      const auto& V = cfg_.validation;
      const bool use_oracle = V.oracle && oracle_applicable(ctx_);
      std::optional<FunctionalContext> fine;
      if (V.refine_nodes > 0) {
        RunConfig fc = cfg_;
        fc.problem.nodes = V.refine_nodes;
        fine = fc.context();
      }
      const SolverConfig sc = cfg_.solver;
      Json entries = Json::array();
      int flagged = 0;
      for (std::size_t i = 0; i < set_->points.size(); ++i) {
        const auto& cp = set_->points[i];
        Json e{{"index", i},
               {"value", cp.value},
               {"strong_residual", to_json(strong_residual(ctx_, cp.u))},
               {"weak_residual", weak_residual(ctx_, cp.u, cp.k)}};
        const GridFunction* best = &cp.u;
        std::optional<Refinement> ref;
        if (fine) {
          const int k_new = V.refine_k > 0 ? V.refine_k : fine->spectrum().size();
          try {
            ref = refine_level(*fine, cp, std::max(k_new, cp.k), sc, V.refine_flag_tol);
            flagged += ref->flagged ? 1 : 0;
            best = &ref->point.u;
            e["refined"] = {{"nodes", fine->grid().nodes()},
                            {"k", ref->point.k},
                            {"value", ref->point.value},
                            {"increment", ref->increment},
                            {"flagged", ref->flagged},
                            {"grad_norm", ref->point.grad_norm},
                            {"amplitude", fourier::interpolated_sup(ref->point.u)},
                            {"period_divisor", fourier::period_divisor(ref->point.u)},
                            {"strong_residual", to_json(strong_residual(*fine, ref->point.u))}};
          } catch (const SolverFailure& f) {
            e["refined"] = {{"failed", f.what()}};
          }
        }
        if (use_oracle) {
          const int j = dominant_harmonic(*best);
          if (j <= V.oracle_j_max) {
            if (const OracleOrbit* o = oracle(j, best->grid())) {
              const double amp = fourier::interpolated_sup(*best);
              e["oracle"] = {{"j", j},
                             {"oracle_amplitude", o->amplitude},
                             {"amplitude", amp},
                             {"amplitude_error", std::abs(amp - o->amplitude)},
                             {"sup_distance", compare_to_oracle(*best, *o)},
                             {"energy_drift", o->energy_drift}};
            }
          }
        }
        entries.push_back(e);
      }
      Json orbits = Json::array();
      if (use_oracle) {
        for (int j = 1; j <= V.oracle_j_max; ++j) {
          const OracleOrbit* o = oracle(j, ctx_.grid());
          if (!o) continue;
          orbits.push_back({{"j", j},
                            {"amplitude", o->amplitude},
                            {"minimal_period", o->minimal_period},
                            {"energy_drift", o->energy_drift}});
          if (cfg_.output.csv) {
            std::ostringstream os;
            os << "t,u\n";
            for (int n = 0; n < ctx_.grid().nodes(); ++n)
              os << format_double(ctx_.grid().node(n)) << ',' << format_double(o->trajectory(n, 0)) << '\n';
            writer_.write("oracle_j" + std::to_string(j) + ".csv", os.str());
          }
        }
      }
      Json j{{"solutions", entries}, {"oracle_orbits", orbits}, {"oracle_applicable", use_oracle}};
      if (cfg_.output.json) writer_.write("validation.json", dump_json(j) + "\n");
      summary_["validation"] = {{"checked", entries.size()}, {"refinement_flags", flagged}};
      log_ << "validate: " << entries.size() << " solutions checked\n";
    });
  }

  void manifest(int code) {
    Json artifacts = Json::array();
    for (const auto& e : writer_.written())
      artifacts.push_back({{"name", e.name}, {"bytes", e.bytes}, {"sha256", e.sha256}});
    Json times = Json::object();
    for (const auto& [k, v] : times_) times[k] = v;
    std::ostringstream eigen;
    eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
    Json j{{"tool", "fountain"},
           {"version", kVersion},
           {"command", to_string(opt_.command)},
           {"config_sha256", sha256_hex(cfg_.text)},
           {"seed", cfg_.seed},
           {"jobs", opt_.jobs},
           {"exit_code", code},
           {"versions", {{"eigen", eigen.str()}, {"boost", BOOST_LIB_VERSION}, {"compiler", __VERSION__}}},
           {"wall_times", times},
           {"artifacts", artifacts},
           {"summary", summary_}};
    writer_.write("manifest.json", dump_json(j) + "\n");
  }

  const RunOptions& opt_;
  const RunConfig& cfg_;
  std::ostream& log_;
  ArtifactWriter writer_;
  FunctionalContext ctx_;
  Json summary_ = Json::object();
  std::map<std::string, double> times_;
  std::optional<std::vector<GeometryReport>> level_geometry_;
  std::optional<CriticalSet> set_;
  std::vector<Branch> branches_;
  std::map<std::pair<int, int>, std::optional<OracleOrbit>> oracles_;
};

}  // namespace

int run(const RunOptions& options, const RunConfig& config, std::ostream& log) {
  const std::string dir = resolve_out(options, config.output.directory);
  try {
    RunConfig cfg = config;
    if (options.seed) cfg.set_seed(*options.seed);
    cfg.set_jobs(options.jobs);
    Session s(options, cfg, log);
    return s.execute();
  } catch (const ConfigError& e) {
    write_error(dir, options, "config", e.what(), e.errors(), log);
  } catch (const std::exception& e) {
    write_error(dir, options, "runtime", e.what(), {}, log);
  }
  return exit_code::failure;
}

int run(const RunOptions& options, std::ostream& log) {
  RunConfig cfg;
  try {
    cfg = load_config(options.config_path);
  } catch (const ConfigError& e) {
    write_error(resolve_out(options, "out"), options, "config", e.what(), e.errors(), log);
    return exit_code::failure;
  }
  return run(options, cfg, log);
}

}  // namespace fountain
