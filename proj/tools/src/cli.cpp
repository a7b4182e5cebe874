#include "annuity_cli/cli.hpp"

#include <CLI11.hpp>
#include <annuity/annuity.hpp>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace annuity::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ModelOptions {
  std::string preset = "base";
  std::string config;
  std::vector<std::string> sets;
  std::string convention = "scaled";
};

struct SimOptions {
  std::size_t paths = 1000;
  std::uint64_t seed = 42;
  double dt = 1.0 / 252;
  double horizon = 20;
  std::string forced_stop = "15";
  unsigned threads = 0;
};

double parse_double(const std::string& text, const std::string& what) {
  double v = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ValidationError(what + ": '" + text + "' is not a number");
  return v;
}

void add_model_options(CLI::App* app, ModelOptions& mo) {
  app->add_option("--preset", mo.preset, "base, m1, m2 or m3")->capture_default_str();
  app->add_option("--config", mo.config, "JSON parameter document (all thirteen keys)");
  app->add_option("--set", mo.sets, "override one parameter, key=value (repeatable)");
  app->add_option("--threshold-convention", mo.convention, "scaled (exact conjugate) or unscaled")
      ->capture_default_str();
}

void add_sim_options(CLI::App* app, SimOptions& so) {
  app->add_option("--paths", so.paths, "number of Monte-Carlo paths")->capture_default_str();
  app->add_option("--seed", so.seed, "random seed")->capture_default_str();
  app->add_option("--dt", so.dt, "time step in years")->capture_default_str();
  app->add_option("--horizon", so.horizon, "maximum simulated years")->capture_default_str();
  app->add_option("--forced-stop", so.forced_stop, "forced annuitization time, or 'none'")
      ->capture_default_str();
  app->add_option("--threads", so.threads, "worker threads, 0 for all cores");
}

ModelParams resolve_params(const ModelOptions& mo) {
  ModelParams p;
  if (!mo.config.empty()) {
    std::ifstream in(mo.config);
    if (!in) throw ValidationError("cannot read config file '" + mo.config + "'");
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw ValidationError(std::string("config file is not valid JSON: ") + e.what());
    }
    p = params_from_json(doc);
  } else {
    p = preset(mo.preset);
  }
  for (const auto& s : mo.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq);
    set_param(p, key, parse_double(s.substr(eq + 1), key));
  }
  return validate(p);
}

SimulationConfig resolve_sim(const SimOptions& so, double x0) {
  SimulationConfig cfg;
  cfg.n_paths = so.paths;
  cfg.seed = so.seed;
  cfg.dt = so.dt;
  cfg.horizon = so.horizon;
  cfg.threads = so.threads;
  cfg.x0 = x0;
  if (so.forced_stop == "none")
    cfg.forced_stop.reset();
  else
    cfg.forced_stop = parse_double(so.forced_stop, "--forced-stop");
  validate(cfg);
  return cfg;
}

std::optional<fs::path> output_dir(const std::string& flag) {
  if (!flag.empty()) return fs::path(flag);
  if (const char* env = std::getenv("ANNUITY_OUT_DIR"); env && *env) return fs::path(env);
  return std::nullopt;
}

void write_text(const fs::path& file, const std::string& text) {
  fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
  out << text;
}

RunManifest manifest_for(const Policy& policy) {
  RunManifest m;
  m.params = policy.solver().params();
  m.constants = policy.solver().constants();
  m.solution = policy.solution();
  return m;
}

std::vector<double> linspace(double from, double to, std::size_t steps) {
  if (steps < 1) throw ValidationError("--steps must be at least 1");
  std::vector<double> v(steps);
  for (std::size_t i = 0; i < steps; ++i)
    v[i] = steps == 1 ? from
                      : from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return v;
}

void apply_sweep_value(ModelParams& p, const std::string& name, double value) {
  if (name == "sharpe")
    p.mu = p.r + value * p.sigma;
  else
    set_param(p, name, value);
}

void check_sweep_name(const std::string& name) {
  if (name == "sharpe") return;
  const auto& keys = param_keys();
  if (std::find(keys.begin(), keys.end(), name) == keys.end())
    throw ValidationError("unknown sweep parameter '" + name + "'");
}

// ---- solve ---------------------------------------------------------------

struct SolveOptions {
  ModelOptions model;
  std::optional<double> x;
  std::string field;
};

int cmd_solve(const SolveOptions& so, std::ostream& out) {
  const ModelParams params = resolve_params(so.model);
  const Policy policy(params, parse_convention(so.model.convention));
  const auto& sol = policy.solution();
  if (!so.field.empty()) {
    const json j = to_json(sol);
    if (sol.regime == Regime::Ruined && (so.field == "x_star" || so.field == "y_star" ||
                                         so.field == "c_coef" || so.field == "y0"))
      throw RegimeError("no stopping boundary in the ruined regime");
    if (!j.contains(so.field)) throw ValidationError("unknown field '" + so.field + "'");
    out << (j[so.field].is_string() ? j[so.field].get<std::string>() : j[so.field].dump()) << '\n';
    return kOk;
  }
  json j = to_json(sol);
  if (so.x) j["policy"] = to_json(policy.policy_at_wealth(*so.x));
  j["manifest"] = to_json(manifest_for(policy));
  out << j.dump(2) << '\n';
  return kOk;
}

// ---- sweep ---------------------------------------------------------------

struct SweepOptions {
  ModelOptions model;
  std::string param;
  double from = 0, to = 0;
  std::size_t steps = 11;
  std::string param2;
  double from2 = 0, to2 = 0;
  std::size_t steps2 = 11;
  std::optional<double> x;
  std::string out;
};

int cmd_sweep(const SweepOptions& so, std::ostream& out) {
  const ModelParams base = resolve_params(so.model);
  const auto convention = parse_convention(so.model.convention);
  check_sweep_name(so.param);
  const bool two_d = !so.param2.empty();
  if (two_d) check_sweep_name(so.param2);
  const auto grid1 = linspace(so.from, so.to, so.steps);
  const auto grid2 = two_d ? linspace(so.from2, so.to2, so.steps2) : std::vector<double>{0.0};

  // validate the whole range before solving anything
  std::vector<ModelParams> points;
  for (double a : grid1)
    for (double b : grid2) {
      ModelParams p = base;
      apply_sweep_value(p, so.param, a);
      if (two_d) apply_sweep_value(p, so.param2, b);
      try {
        points.push_back(validate(p));
      } catch (const ValidationError& e) {
        throw ValidationError(std::string("sweep range outside validation limits: ") + e.what());
      }
    }

  std::ostringstream csv;
  csv << "param_value";
  if (two_d) csv << ",param2_value";
  csv << ",x_star,y_star";
  if (so.x) csv << ",value_at_x";
  csv << '\n';
  std::size_t idx = 0;
  for (double a : grid1)
    for (double b : grid2) {
      const Policy policy(points[idx++], convention);
      const auto& sol = policy.solution();
      const bool stop = sol.regime == Regime::Stopping;
      csv << format_number(a);
      if (two_d) csv << ',' << format_number(b);
      csv << ',' << (stop ? format_number(sol.x_star) : "nan") << ','
          << (stop ? format_number(sol.y_star) : "nan");
      if (so.x) csv << ',' << format_number(policy.value_function(*so.x));
      csv << '\n';
    }

  if (const auto dir = output_dir(so.out)) {
    write_text(*dir / "sweep.csv", csv.str());
    RunManifest m;
    m.params = base;
    m.constants = derive_constants(base, convention);
    m.solution = BoundarySolver(DualUtility(base, m.constants)).solve();
    m.config = {{"param", so.param}, {"from", so.from}, {"to", so.to}, {"steps", so.steps}};
    if (two_d)
      m.config["param2"] = {{"name", so.param2}, {"from", so.from2}, {"to", so.to2},
                            {"steps", so.steps2}};
    if (so.x) m.config["x"] = *so.x;
    m.outputs = {"sweep.csv"};
    write_text(*dir / "manifest.json", to_json(m).dump(2) + "\n");
  }
  out << csv.str();
  return kOk;
}

std::string cfg_note(const SimulationConfig& cfg) {
  if (cfg.forced_stop)
    return "paths not stopped by year " + format_number(*cfg.forced_stop) +
           " annuitize there with their continuation wealth and are flagged censored";
  return "paths not stopped by the horizon are flagged censored; x_tau is their wealth at the "
         "horizon";
}

// ---- simulate ------------------------------------------------------------

struct SimulateOptions {
  ModelOptions model;
  SimOptions sim;
  double x0 = 1000;
  std::vector<double> x0_list;
  std::string out;
};

int cmd_simulate(const SimulateOptions& so, std::ostream& out) {
  const ModelParams params = resolve_params(so.model);
  const Policy policy(params, parse_convention(so.model.convention));
  if (policy.solution().regime != Regime::Stopping)
    throw RegimeError("simulation needs a stopping boundary (ruined regime)");
  const std::vector<double> x0s = so.x0_list.empty() ? std::vector<double>{so.x0} : so.x0_list;
  const double rho = policy.solver().constants().rho;
  const auto dir = output_dir(so.out);

  RunManifest m = manifest_for(policy);
  const SimulationConfig base_cfg = resolve_sim(so.sim, x0s.front());
  m.seed = base_cfg.seed;
  m.config = to_json(base_cfg);
  m.config.erase("x0");
  m.config["x0"] = x0s;

  json runs = json::array();
  json sweep = json::array();
  for (double x0 : x0s) {
    const SimulationConfig cfg = resolve_sim(so.sim, x0);
    const CohortStats stats = run_cohort(policy, cfg);
    json run{{"x0", x0}, {"summary", to_json(stats, rho)}};
    if (dir) {
      const std::string name =
          x0s.size() == 1 ? "paths.csv" : "paths_x0_" + format_number(x0) + ".csv";
      std::ostringstream csv;
      write_paths_csv(csv, stats.paths);
      write_text(*dir / name, csv.str());
      run["paths_csv"] = name;
      m.outputs.push_back(name);
    }
    runs.push_back(run);
    sweep.push_back({{"x0", x0},
                     {"mean_tau", stats.mean_tau},
                     {"mean_consumption", stats.consumption.mean},
                     {"mean_labor_income", stats.labor_income.mean},
                     {"prob_censored", static_cast<double>(stats.n_censored) /
                                           static_cast<double>(stats.paths.size())},
                     {"immediate_stop", x0 >= policy.solution().x_star}});
  }

  json summary;
  summary["schema_version"] = 1;
  summary["notes"] = {
      {"censored_paths", cfg_note(base_cfg)},
      {"annuity", "annual_annuity is k*x_tau; annuity_pv discounts that payment at rho to t=0"},
      {"annual_quantities", "time averages over [0, tau]"},
      {"mortality", "absorbed in the discount rate rho = r + delta"}};
  summary["runs"] = runs;
  if (x0s.size() > 1) summary["initial_wealth_sweep"] = sweep;
  if (dir) {
    m.outputs.push_back("summary.json");
    summary["manifest"] = to_json(m);
    write_text(*dir / "summary.json", summary.dump(2) + "\n");
    write_text(*dir / "manifest.json", to_json(m).dump(2) + "\n");
  } else {
    summary["manifest"] = to_json(m);
  }
  out << summary.dump(2) << '\n';
  return kOk;
}

// ---- verify --------------------------------------------------------------

struct VerifyCliOptions {
  ModelOptions model;
  SimOptions sim;
  double x0 = 1000;
  std::size_t grid = 2000;
  bool no_monte_carlo = false;
  double perturb = 1.0;
  std::string out;
};

int cmd_verify(const VerifyCliOptions& vo, std::ostream& out) {
  const ModelParams params = resolve_params(vo.model);
  const BoundarySolver solver(DualUtility(params, parse_convention(vo.model.convention)));
  DualSolution sol = solver.solve();
  if (vo.perturb != 1.0 && sol.regime == Regime::Stopping) {
    sol.y_star *= vo.perturb;
    sol.c_coef = solver.c_coefficient(sol.y_star);
    sol.x_star = solver.utility().inv_marginal_wealth(solver.constants().rho * sol.y_star);
  }
  const Policy policy(solver, sol);
  VerifyOptions opts;
  opts.grid_points = vo.grid;
  opts.monte_carlo = !vo.no_monte_carlo;
  opts.mc = resolve_sim(vo.sim, vo.x0);
  const auto report = run_all(policy, opts);

  RunManifest m = manifest_for(policy);
  m.seed = opts.mc.seed;
  m.config = {{"grid_points", vo.grid}, {"monte_carlo", opts.monte_carlo},
              {"y_star_perturbation", vo.perturb}, {"simulation", to_json(opts.mc)}};
  json j{{"passed", report.all_passed()}, {"checks", to_json(report)}};
  if (const auto dir = output_dir(vo.out)) {
    m.outputs = {"report.json"};
    j["manifest"] = to_json(m);
    write_text(*dir / "report.json", j.dump(2) + "\n");
  } else {
    j["manifest"] = to_json(m);
  }
  out << j.dump(2) << '\n';
  return report.all_passed() ? kOk : kVerificationFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Annuitization with post-retirement labor: dual free-boundary solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  SolveOptions solve;
  auto* s = app.add_subcommand("solve", "solve for the free boundary and critical wealth");
  add_model_options(s, solve.model);
  s->add_option("--x", solve.x, "also report the policy at this wealth");
  s->add_option("--field", solve.field, "print only this solution field");

  SweepOptions sweep;
  auto* w = app.add_subcommand("sweep", "critical wealth over a parameter range");
  add_model_options(w, sweep.model);
  w->add_option("--param", sweep.param, "parameter key or 'sharpe'")->required();
  w->add_option("--from", sweep.from)->required();
  w->add_option("--to", sweep.to)->required();
  w->add_option("--steps", sweep.steps)->capture_default_str();
  w->add_option("--param2", sweep.param2, "second parameter for a 2-D grid");
  w->add_option("--from2", sweep.from2);
  w->add_option("--to2", sweep.to2);
  w->add_option("--steps2", sweep.steps2)->capture_default_str();
  w->add_option("--x", sweep.x, "also report V(x) at each point");
  w->add_option("--out", sweep.out, "output directory");

  SimulateOptions sim;
  auto* m = app.add_subcommand("simulate", "Monte-Carlo cohort of optimal strategies");
  add_model_options(m, sim.model);
  add_sim_options(m, sim.sim);
  m->add_option("--x0", sim.x0, "initial wealth")->capture_default_str();
  m->add_option("--x0-list", sim.x0_list, "comma-separated initial wealth levels")
      ->delimiter(',');
  m->add_option("--out", sim.out, "output directory");

  VerifyCliOptions ver;
  auto* v = app.add_subcommand("verify", "run the oracle checks");
  add_model_options(v, ver.model);
  add_sim_options(v, ver.sim);
  ver.sim.paths = 10000;
  ver.sim.forced_stop = "none";
  v->add_option("--x0", ver.x0, "initial wealth for the Monte-Carlo checks")->capture_default_str();
  v->add_option("--grid", ver.grid, "grid points for the residual checks")->capture_default_str();
  v->add_flag("--no-monte-carlo", ver.no_monte_carlo, "skip the budget and duality-gap checks");
  v->add_option("--perturb-y-star", ver.perturb, "multiply y* before checking (sensitivity probe)");
  v->add_option("--out", ver.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidInput;
  }

  try {
    if (*s) return cmd_solve(solve, out);
    if (*w) return cmd_sweep(sweep, out);
    if (*m) return cmd_simulate(sim, out);
    return cmd_verify(ver, out);
  } catch (const RegimeError& e) {
    err << "regime error: " << e.what() << '\n';
    return kRegimeError;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const OutOfRangeError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const PreconditionError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kVerificationFailed;
  }
}

}  // namespace annuity::cli
