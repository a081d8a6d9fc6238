#include "conegl/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "conegl/balls.hpp"
#include "conegl/degree_cost.hpp"
#include "conegl/errors.hpp"
#include "conegl/plot.hpp"
#include "conegl/renorm.hpp"
#include "conegl/vortex.hpp"

namespace conegl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json config_json(const ExperimentConfig& c) {
  return json{
      {"schema_version", c.schema_version},
      {"alpha", c.alpha},
      {"dbar", c.dbar},
      {"epsilons", c.epsilons},
      {"grid", {{"n_r", c.n_r}, {"n_theta", c.n_theta}, {"r_min", c.r_min}}},
      {"solver",
       {{"max_iters", c.solver.max_iters},
        {"grad_tol", c.solver.grad_tol},
        {"step_rule", c.solver.step_rule},
        {"seed", c.solver.seed},
        {"init_noise", c.solver.init_noise}}},
      {"output_dir", c.output_dir},
      {"mtable",
       {{"d_min", c.d_min}, {"d_max", c.d_max}, {"alpha_count", c.alpha_count}}},
      {"growth", {{"balls", c.growth_balls}, {"t_final", c.growth_t_final}}},
      {"renorm", {{"landscape_samples", c.landscape_samples}}},
      {"core", {{"which", c.core_which}, {"eta", c.core_eta}}},
      {"fit", {{"inputs", c.fit_inputs}}},
  };
}

ExperimentConfig config_from(const json& j) {
  ExperimentConfig c;
  c.schema_version = j.value("schema_version", 1);
  c.alpha = j.value("alpha", c.alpha);
  c.dbar = j.value("dbar", c.dbar);
  if (j.contains("epsilons")) c.epsilons = j["epsilons"].get<std::vector<double>>();
  if (j.contains("grid")) {
    const json& g = j["grid"];
    c.n_r = g.value("n_r", c.n_r);
    c.n_theta = g.value("n_theta", c.n_theta);
    c.r_min = g.value("r_min", c.r_min);
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    c.solver.max_iters = s.value("max_iters", c.solver.max_iters);
    c.solver.grad_tol = s.value("grad_tol", c.solver.grad_tol);
    c.solver.step_rule = s.value("step_rule", c.solver.step_rule);
    c.solver.seed = s.value("seed", c.solver.seed);
    c.solver.init_noise = s.value("init_noise", c.solver.init_noise);
  }
  c.output_dir = j.value("output_dir", c.output_dir);
  if (j.contains("mtable")) {
    const json& m = j["mtable"];
    c.d_min = m.value("d_min", c.d_min);
    c.d_max = m.value("d_max", c.d_max);
    c.alpha_count = m.value("alpha_count", c.alpha_count);
  }
  if (j.contains("growth")) {
    const json& g = j["growth"];
    c.growth_balls = g.value("balls", c.growth_balls);
    c.growth_t_final = g.value("t_final", c.growth_t_final);
  }
  if (j.contains("renorm")) {
    c.landscape_samples = j["renorm"].value("landscape_samples", c.landscape_samples);
  }
  if (j.contains("core")) {
    c.core_which = j["core"].value("which", c.core_which);
    c.core_eta = j["core"].value("eta", c.core_eta);
  }
  if (j.contains("fit")) {
    c.fit_inputs = j["fit"].value("inputs", c.fit_inputs);
  }
  return c;
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << text;
}

void write_record(const fs::path& path, const ExperimentConfig& cfg,
                  json payload) {
  payload["schema_version"] = cfg.schema_version;
  payload["config"] = config_json(cfg);
  write_text(path, payload.dump(2) + "\n");
}

fs::path resolved_output_dir(const ExperimentConfig& cfg) {
  fs::path out = cfg.output_dir;
  if (const char* root = std::getenv("CONEGL_OUTPUT_ROOT")) {
    if (root[0] != '\0' && out.is_relative()) out = fs::path(root) / out;
  }
  fs::create_directories(out);
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(alpha > 0.0) || !(alpha < kTwoPi)) {
    throw std::invalid_argument("config: alpha must lie strictly in (0, 2*pi)");
  }
  if (epsilons.empty()) throw std::invalid_argument("config: empty epsilon list");
  for (double e : epsilons) {
    if (!(e > 0.0) || !(e < 1.0)) {
      throw std::invalid_argument("config: epsilons must lie in (0, 1)");
    }
  }
  if (n_r < 16 || n_theta < 16) {
    throw std::invalid_argument("config: grid must be at least 16 x 16");
  }
  if (!(r_min > 0.0) || !(r_min < 1.0)) {
    throw std::invalid_argument("config: r_min must lie in (0, 1)");
  }
  if (solver.max_iters < 1 || !(solver.grad_tol > 0.0)) {
    throw std::invalid_argument("config: bad solver options");
  }
  if (solver.step_rule != "bb" && solver.step_rule != "ncg") {
    throw std::invalid_argument("config: step_rule must be bb or ncg");
  }
  if (output_dir.empty()) throw std::invalid_argument("config: empty output_dir");
}

std::string config_to_json(const ExperimentConfig& cfg) {
  return config_json(cfg).dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  return config_from(json::parse(text));
}

// --- minimize ----------------------------------------------------------------

void run_minimize(const ExperimentConfig& cfg) {
  cfg.validate();
  const ConeParams cone(cfg.alpha);
  const SectorGrid grid(cone, cfg.n_r, cfg.n_theta, cfg.r_min);
  const BoundaryData bc = canonical_boundary(cfg.dbar, grid);
  const fs::path out = resolved_output_dir(cfg);

  const BoundaryFlux flux = BoundaryFlux::constant();
  const int caseno = select_case(cfg.dbar, cone);
  const int K = (caseno == 1)   ? std::abs(cfg.dbar - 1)
                : (caseno == 2) ? std::abs(cfg.dbar)
                                : 0;
  MinimizeWOptions wopts;
  wopts.seed = cfg.solver.seed;
  VortexConfig wconfig = minimize_W(cfg.dbar, cone, flux, K, wopts);

  json summary;
  summary["runs"] = json::array();
  for (double eps : cfg.epsilons) {
    const fs::path dir = out / ("eps_" + eps_tag(eps));
    fs::create_directories(dir);

    TangentField init(grid);
    bool used_test_field = true;
    try {
      init = build_test_field(cfg.dbar, cone, eps, wconfig, grid, nullptr);
    } catch (const OverlappingExcisions&) {
      init = ramp_initial_field(bc, grid, cfg.solver);
      used_test_field = false;
    }
    const MinimizeResult res = minimize(init, bc, eps, cfg.solver);
    if (!res.diagnostics.converged) {
      throw NotConverged("run_minimize: solver hit max_iters at eps " +
                         eps_tag(eps));
    }
    const VortexSet vs = detect_vortices(res.field, eps);

    save_field(res.field, eps, (dir / "field.txt").string());
    write_record(dir / "energy.json", cfg,
                 json{{"epsilon", eps},
                      {"dirichlet", res.energy.dirichlet},
                      {"potential", res.energy.potential},
                      {"total", res.energy.total}});
    json vortices = json::array();
    for (const DetectedVortex& v : vs.vortices) {
      vortices.push_back(json{{"r", v.position.r},
                              {"theta", v.position.theta},
                              {"degree", v.degree}});
    }
    write_record(dir / "vortices.json", cfg,
                 json{{"alpha", cfg.alpha},
                      {"dbar", vs.dbar},
                      {"epsilon", eps},
                      {"tip_degree", vs.tip_degree},
                      {"vortices", vortices}});
    json history = json::array();
    for (const IterRecord& rec : res.diagnostics.history) {
      history.push_back(json{{"iteration", rec.iteration},
                             {"energy", rec.energy},
                             {"grad_norm", rec.grad_norm}});
    }
    write_record(dir / "diagnostics.json", cfg,
                 json{{"epsilon", eps},
                      {"iterations", res.diagnostics.iterations},
                      {"converged", res.diagnostics.converged},
                      {"grad_norm_rel", res.diagnostics.grad_norm_rel},
                      {"init_from_test_field", used_test_field},
                      {"history", history}});
    write_modulus_heatmap(res.field, (dir / "modulus.ppm").string());
    write_phase_quiver(res.field, (dir / "phase.svg").string());

    summary["runs"].push_back(json{{"epsilon", eps},
                                   {"total_energy", res.energy.total},
                                   {"tip_degree", vs.tip_degree},
                                   {"off_tip_count", vs.vortices.size()}});
  }
  write_record(out / "summary.json", cfg, std::move(summary));
}

// --- mtable --------------------------------------------------------------------

void run_mtable(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.d_min > cfg.d_max || cfg.alpha_count < 2) {
    throw std::invalid_argument("mtable: bad degree or alpha range");
  }
  const fs::path out = resolved_output_dir(cfg);
  std::string csv = "d,alpha,m_closed,m_bruteforce,d0,d1\n";
  double worst = 0.0;
  char line[160];
  for (int d = cfg.d_min; d <= cfg.d_max; ++d) {
    for (int ia = 0; ia < cfg.alpha_count; ++ia) {
      const double alpha =
          0.05 + (kTwoPi - 0.1) * ia / (cfg.alpha_count - 1.0);
      const ConeParams cone(alpha);
      const double closed = m_closed(d, cone);
      const DegreeSplit split = m_bruteforce(d, cone);
      worst = std::max(worst, std::fabs(closed - split.cost));
      std::snprintf(line, sizeof line, "%d,%.12g,%.17g,%.17g,%d,%d\n", d,
                    alpha, closed, split.cost, split.d0, split.d1);
      csv += line;
    }
  }
  write_text(out / "mtable.csv", csv);
  write_record(out / "mtable.json", cfg,
               json{{"max_abs_difference", worst}, {"within_1e-12", worst <= 1e-12}});
  if (worst > 1e-12) {
    throw NumericalError("mtable: closed form deviates from brute force");
  }
}

// --- growth --------------------------------------------------------------------

void run_growth(const ExperimentConfig& cfg) {
  cfg.validate();
  const ConeParams cone(cfg.alpha);
  const fs::path out = resolved_output_dir(cfg);
  const BallFamily family =
      random_admissible_family(cone, cfg.growth_balls, cfg.solver.seed);
  const double r0 = family.total_radius();
  const double t_final = (cfg.growth_t_final > 0.0)
                             ? cfg.growth_t_final
                             : std::max(0.1, std::log(0.5 / r0));
  const GrowthTrajectory traj = grow(family, t_final);

  bool bounds_ok = true;
  json snapshots = json::array();
  for (const GrowthSnapshot& s : traj.snapshots) {
    double rsum = 0.0;
    json balls = json::array();
    for (const Ball& b : s.balls) {
      rsum += b.radius;
      balls.push_back(json{{"r", b.center.r},
                           {"theta", b.center.theta},
                           {"radius", b.radius},
                           {"degree", b.degree}});
    }
    const double lo = std::exp(s.time) * r0;
    const double hi = (1.0 + kTwoPi / cfg.alpha) * lo;
    if (rsum < lo * (1.0 - 1e-9) || rsum > hi * (1.0 + 1e-9)) bounds_ok = false;
    snapshots.push_back(
        json{{"time", s.time}, {"radius_sum", rsum}, {"balls", balls}});
  }
  json events = json::array();
  for (const MergeEvent& e : traj.events) {
    events.push_back(json{{"time", e.time}, {"description", e.description}});
  }
  const double ledger = lower_bound_ledger(traj, cone);
  write_record(out / "trajectory.json", cfg,
               json{{"t_final", t_final},
                    {"initial_radius_sum", r0},
                    {"snapshots", snapshots},
                    {"events", events},
                    {"lower_bound_ledger", ledger},
                    {"growth_bounds_ok", bounds_ok}});
  if (!bounds_ok) {
    throw NumericalError("growth: trajectory violates the radius-sum bounds");
  }
}

// --- renorm --------------------------------------------------------------------

void run_renorm(const ExperimentConfig& cfg) {
  cfg.validate();
  const ConeParams cone(cfg.alpha);
  const fs::path out = resolved_output_dir(cfg);
  const BoundaryFlux flux = BoundaryFlux::constant();
  const int caseno = select_case(cfg.dbar, cone);
  const int K = (caseno == 1)   ? std::abs(cfg.dbar - 1)
                : (caseno == 2) ? std::abs(cfg.dbar)
                                : 0;
  MinimizeWOptions wopts;
  wopts.seed = cfg.solver.seed;
  const VortexConfig best = minimize_W(cfg.dbar, cone, flux, K, wopts);
  const double wmin = renormalized_energy(best, cone, flux);

  json positions = json::array();
  for (const cplx& z : best.disc_positions) {
    positions.push_back(json{{"re", z.real()},
                             {"im", z.imag()},
                             {"disc_radius", std::abs(z)},
                             {"cone_radius", std::pow(std::abs(z), cone.beta())}});
  }
  write_record(out / "wmin.json", cfg,
               json{{"case", best.caseno},
                    {"K", K},
                    {"W", wmin},
                    {"positions", positions}});

  // W landscape for a single free vortex: polar grid over the disc
  if (K == 1) {
    const int n = cfg.landscape_samples;
    std::string csv = "rho,phi,W\n";
    std::vector<double> raster(static_cast<std::size_t>(n) * n, NAN);
    char line[96];
    for (int a = 0; a < n; ++a) {
      const double rho = 0.05 + 0.90 * a / (n - 1.0);
      for (int p = 0; p < n; ++p) {
        const double phi = kTwoPi * p / n;
        const double w = renormalized_energy(
            make_config(cfg.dbar, cone, {std::polar(rho, phi)}), cone, flux);
        std::snprintf(line, sizeof line, "%.8g,%.8g,%.10g\n", rho, phi, w);
        csv += line;
        raster[static_cast<std::size_t>(a) * n + p] = w;
      }
    }
    write_text(out / "w_landscape.csv", csv);
    write_scalar_heatmap(raster, n, n, (out / "w_landscape.ppm").string());
  }
}

// --- core-energy ----------------------------------------------------------------

void run_core_energy(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!(cfg.core_eta > 0.0) || cfg.core_eta > 1.0) {
    throw std::invalid_argument("core-energy: eta must lie in (0, 1]");
  }
  const ConeParams cone(cfg.alpha);
  const fs::path out = resolved_output_dir(cfg);
  CoreOptions copts;
  copts.solver.seed = cfg.solver.seed;

  json mu = json::array();
  for (double eps : cfg.epsilons) {
    if (!(eps < cfg.core_eta)) {
      throw std::invalid_argument("core-energy: need eps < eta");
    }
    json row{{"epsilon", eps}};
    for (int which : {1, 2}) {
      if (cfg.core_which != 0 && cfg.core_which != which) continue;
      const CoreSolution sol = solve_core_mu(which, eps, cfg.core_eta, cone, copts);
      const double radial = mu_radial_ansatz(which, eps, cfg.core_eta, cone);
      row["mu" + std::to_string(which)] = sol.value;
      row["mu" + std::to_string(which) + "_radial_ansatz"] = radial;
    }
    mu.push_back(row);
  }

  json gammas = json::array();
  for (double eps : cfg.epsilons) {
    if (eps < 0.5) {
      gammas.push_back(json{{"epsilon", eps}, {"gamma", gamma_radial(eps)}});
    }
  }

  json g0;
  if (cfg.epsilons.size() >= 3) {
    std::vector<double> seq = cfg.epsilons;
    std::sort(seq.rbegin(), seq.rend());
    const Gamma0Result res = gamma0(cfg.dbar, cone, seq, copts);
    g0 = json{{"value", res.value},
              {"error_estimate", res.error_estimate},
              {"which", res.which},
              {"sequence", res.sequence}};
  }
  write_record(out / "core.json", cfg,
               json{{"eta", cfg.core_eta},
                    {"mu", mu},
                    {"gamma", gammas},
                    {"gamma0", g0}});
}

// --- fit -------------------------------------------------------------------------

void run_fit(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.fit_inputs.size() < 3) {
    throw std::invalid_argument("fit: need at least 3 energy records");
  }
  const fs::path out = resolved_output_dir(cfg);
  std::vector<std::pair<double, double>> runs;
  for (const std::string& path : cfg.fit_inputs) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("fit: cannot open " + path);
    json j;
    is >> j;
    runs.push_back({j.at("epsilon").get<double>(), j.at("total").get<double>()});
  }
  const ExpansionFit fit = fit_expansion(runs);
  const ConeParams cone(cfg.alpha);
  const double target = kPi * m_closed(cfg.dbar, cone);
  write_record(out / "fit.json", cfg,
               json{{"slope", fit.slope},
                    {"intercept", fit.intercept},
                    {"max_residual", fit.max_residual},
                    {"pi_m_target", target},
                    {"slope_rel_error", std::fabs(fit.slope - target) / target}});
}

// --- entry point -------------------------------------------------------------------

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Ginzburg-Landau vortices on a cone: numerical laboratory"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string config_path;
  std::vector<double> eps_override;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--alpha", cfg.alpha, "cone opening angle (radians)");
    sub->add_option("--dbar", cfg.dbar, "boundary cone degree");
    sub->add_option("--eps", eps_override, "epsilon values");
    sub->add_option("--nr", cfg.n_r, "radial node count");
    sub->add_option("--ntheta", cfg.n_theta, "angular node count");
    sub->add_option("--rmin", cfg.r_min, "inner excision radius");
    sub->add_option("--seed", cfg.solver.seed, "random seed");
    sub->add_option("--max-iters", cfg.solver.max_iters, "solver iteration cap");
    sub->add_option("--grad-tol", cfg.solver.grad_tol, "solver gradient tolerance");
    sub->add_option("--step-rule", cfg.solver.step_rule, "bb or ncg");
    sub->add_option("--out", cfg.output_dir, "output directory");
  };

  CLI::App* minimize_cmd = app.add_subcommand("minimize", "relax the GL energy");
  CLI::App* mtable_cmd = app.add_subcommand("mtable", "degree-cost table");
  CLI::App* growth_cmd = app.add_subcommand("growth", "ball growth trajectory");
  CLI::App* renorm_cmd = app.add_subcommand("renorm", "renormalized energy");
  CLI::App* core_cmd = app.add_subcommand("core-energy", "core problems");
  CLI::App* fit_cmd = app.add_subcommand("fit", "energy expansion fit");
  for (CLI::App* sub :
       {minimize_cmd, mtable_cmd, growth_cmd, renorm_cmd, core_cmd, fit_cmd}) {
    add_common(sub);
  }
  mtable_cmd->add_option("--d-min", cfg.d_min, "smallest degree");
  mtable_cmd->add_option("--d-max", cfg.d_max, "largest degree");
  mtable_cmd->add_option("--alpha-count", cfg.alpha_count, "alpha sample count");
  growth_cmd->add_option("--balls", cfg.growth_balls, "off-tip ball count");
  growth_cmd->add_option("--t-final", cfg.growth_t_final, "growth horizon");
  renorm_cmd->add_option("--landscape-samples", cfg.landscape_samples,
                         "W landscape resolution");
  core_cmd->add_option("--which", cfg.core_which, "core problem (0 = both)");
  core_cmd->add_option("--eta", cfg.core_eta, "core sector radius");
  fit_cmd->add_option("--inputs", cfg.fit_inputs, "energy.json paths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw std::invalid_argument("cannot open config " + config_path);
      std::string text((std::istreambuf_iterator<char>(is)),
                       std::istreambuf_iterator<char>());
      ExperimentConfig from_file = config_from_json(text);
      // command-line flags override file values
      ExperimentConfig defaults;
      auto pick = [](auto flag_value, auto default_value, auto file_value) {
        return (flag_value == default_value) ? file_value : flag_value;
      };
      from_file.alpha = pick(cfg.alpha, defaults.alpha, from_file.alpha);
      from_file.dbar = pick(cfg.dbar, defaults.dbar, from_file.dbar);
      from_file.n_r = pick(cfg.n_r, defaults.n_r, from_file.n_r);
      from_file.n_theta = pick(cfg.n_theta, defaults.n_theta, from_file.n_theta);
      from_file.r_min = pick(cfg.r_min, defaults.r_min, from_file.r_min);
      from_file.solver.seed =
          pick(cfg.solver.seed, defaults.solver.seed, from_file.solver.seed);
      from_file.solver.max_iters = pick(cfg.solver.max_iters,
                                        defaults.solver.max_iters,
                                        from_file.solver.max_iters);
      from_file.solver.grad_tol = pick(cfg.solver.grad_tol,
                                       defaults.solver.grad_tol,
                                       from_file.solver.grad_tol);
      from_file.solver.step_rule = pick(cfg.solver.step_rule,
                                        defaults.solver.step_rule,
                                        from_file.solver.step_rule);
      from_file.output_dir =
          pick(cfg.output_dir, defaults.output_dir, from_file.output_dir);
      from_file.d_min = pick(cfg.d_min, defaults.d_min, from_file.d_min);
      from_file.d_max = pick(cfg.d_max, defaults.d_max, from_file.d_max);
      from_file.alpha_count =
          pick(cfg.alpha_count, defaults.alpha_count, from_file.alpha_count);
      from_file.growth_balls =
          pick(cfg.growth_balls, defaults.growth_balls, from_file.growth_balls);
      from_file.growth_t_final = pick(cfg.growth_t_final,
                                      defaults.growth_t_final,
                                      from_file.growth_t_final);
      from_file.landscape_samples = pick(cfg.landscape_samples,
                                         defaults.landscape_samples,
                                         from_file.landscape_samples);
      from_file.core_which =
          pick(cfg.core_which, defaults.core_which, from_file.core_which);
      from_file.core_eta = pick(cfg.core_eta, defaults.core_eta, from_file.core_eta);
      if (!eps_override.empty()) from_file.epsilons = eps_override;
      if (!cfg.fit_inputs.empty()) from_file.fit_inputs = cfg.fit_inputs;
      cfg = from_file;
    } else if (!eps_override.empty()) {
      cfg.epsilons = eps_override;
    }

    if (minimize_cmd->parsed()) run_minimize(cfg);
    if (mtable_cmd->parsed()) run_mtable(cfg);
    if (growth_cmd->parsed()) run_growth(cfg);
    if (renorm_cmd->parsed()) run_renorm(cfg);
    if (core_cmd->parsed()) run_core_energy(cfg);
    if (fit_cmd->parsed()) run_fit(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace conegl
