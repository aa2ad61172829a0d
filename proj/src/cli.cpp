#include "nlskt/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "nlskt/bounded_domain.hpp"
#include "nlskt/config.hpp"
#include "nlskt/errors.hpp"
#include "nlskt/experiments.hpp"
#include "nlskt/kolmogorov.hpp"
#include "nlskt/norms.hpp"

namespace nlskt {

namespace {

struct Flags {
  std::string config_path;
  std::vector<std::string> assignments;
  std::string kernel, ic, out, which;
  bool smoke = false;
};

std::string out_file(const RunConfig& cfg, const std::string& suffix) {
  return (std::filesystem::path(cfg.get_string("output.dir")) / (cfg.get_string("output.name") + suffix)).string();
}

void write_resolved(const RunConfig& cfg) {
  const std::string dir = cfg.get_string("output.dir");
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / "resolved_config");
  if (!out) throw ConfigError("cannot write into output directory '" + dir + "'");
  out << cfg.to_ini();
}

std::optional<double> optional_double(const RunConfig& cfg, const std::string& key) {
  if (cfg.get_string(key).empty()) return std::nullopt;
  return cfg.get_double(key);
}

RunOptions run_options(const RunConfig& cfg, const SolverConfig& solver) {
  RunOptions o;
  o.output_dir = cfg.get_string("output.dir");
  o.name = cfg.get_string("output.name");
  o.diagnostics.tolerance = solver.tolerance;
  if (cfg.has("output.snapshots")) o.snapshot_times = cfg.get_list("output.snapshots");
  if (cfg.has("output.dissipation")) {
    const std::string d = cfg.get_string("output.dissipation");
    if (d != "auto") o.diagnostics.compute_dissipation = cfg.get_bool("output.dissipation");
  }
  if (cfg.has("output.entropy_check")) o.diagnostics.check_entropy = cfg.get_bool("output.entropy_check");
  return o;
}

void print_run_summary(const RunOutput& r) {
  std::cout << "steps " << r.records.size() << ", completed " << (r.completed ? "yes" : "no") << ", mass drift "
            << r.max_mass_drift << ", positivity " << (r.positivity_ok ? "ok" : "VIOLATED") << ", entropy "
            << (r.entropy_checked ? (r.entropy_ok ? "ok" : "VIOLATED") : "not checked") << ", " << r.seconds
            << " s\n";
}

int run_simulate(const RunConfig& cfg) {
  const SolverConfig solver = solver_config(cfg);
  const int dim = cfg.get_int("grid.dimension");
  if (dim != 1 && dim != 2) throw ConfigError("grid.dimension must be 1 or 2");
  const PeriodicGrid grid = dim == 1 ? make_periodic_1d(cfg.get_int("grid.cells"), cfg.get_double("grid.length"))
                                     : make_periodic_2d(cfg.get_int("grid.cells"), cfg.get_int("grid.cells_y"),
                                                        cfg.get_double("grid.length"), cfg.get_double("grid.length_y"));
  DiffusionCoefficients c;
  c.d1 = cfg.get_double("coefficients.d1");
  c.d2 = cfg.get_double("coefficients.d2");
  c.d11 = cfg.get_double("coefficients.d11");
  c.d22 = cfg.get_double("coefficients.d22");
  c.d12 = cfg.get_double("coefficients.d12");
  c.d21 = cfg.get_double("coefficients.d21");
  auto k = [&](const char* key) { return discretize(parse_kernel(cfg.get_string(key)), grid); };
  const SchemeParams params =
      make_scheme_params(c, k("kernels.sigma1"), k("kernels.sigma2"), k("kernels.rho1"), k("kernels.rho2"),
                         parse_reaction(cfg.get_string("reaction.type"), cfg.get_string("reaction.coefficients")));
  State init;
  const std::string preset = cfg.get_string("initial.preset");
  if (preset == "custom") {
    init = initial_state(parse_profile(cfg.get_string("initial.u1")), parse_profile(cfg.get_string("initial.u2")),
                         grid);
  } else {
    if (dim != 1) throw ConfigError("initial presets are 1D only; use initial.preset = custom");
    init = study_initial_state(study_data_from_string(preset), grid);
  }
  const double dt = cfg.get_double("time.dt");
  const double t_final = cfg.get_double("time.t_final");
  if (!(dt > 0.0) || !(t_final > 0.0)) throw ConfigError("time.dt and time.t_final must be positive");
  write_resolved(cfg);
  const RunOutput r = run_simulation(params, init, t_final, dt, solver, run_options(cfg, solver));
  print_run_summary(r);
  if (!r.completed) {
    std::cerr << "solver failure: " << r.failure << "\n";
    return 3;
  }
  return 0;
}

int run_converge(const RunConfig& cfg) {
  ConvergenceStudy s;
  s.kernel = study_kernel_from_string(cfg.get_string("study.kernel"));
  s.data = study_data_from_string(cfg.get_string("study.ic"));
  s.length = cfg.get_double("study.length");
  s.t_final = cfg.get_double("study.t_final");
  s.levels = cfg.get_int("study.levels");
  s.base_cells = cfg.get_int("study.base_cells");
  s.base_dt = cfg.get_double("study.base_dt");
  s.d12 = cfg.get_double("study.d12");
  s.d21 = cfg.get_double("study.d21");
  s.d1 = cfg.get_double("study.d1");
  s.d2 = cfg.get_double("study.d2");
  s.fit_levels = cfg.get_int("study.fit_levels");
  s.aggregation = cfg.get_string("study.aggregation");
  s.solver = solver_config(cfg);
  write_resolved(cfg);
  const ConvergenceResult r = run_convergence(s, run_options(cfg, s.solver));
  std::cout << "kernel " << to_string(s.kernel) << ", initial data " << to_string(s.data) << "\n";
  for (const auto& row : r.rows) {
    std::cout << "  N=" << row.cells << " error " << row.error << " (" << row.seconds << " s)\n";
  }
  std::cout << "order " << r.order << ", invariants " << (r.invariants_ok ? "ok" : "VIOLATED") << "\n";
  return 0;
}

int run_localize(const RunConfig& cfg) {
  LocalizationStudy s;
  s.data = study_data_from_string(cfg.get_string("study.ic"));
  s.length = cfg.get_double("study.length");
  s.t_final = cfg.get_double("study.t_final");
  s.cells = cfg.get_int("study.cells");
  s.dt = cfg.get_double("study.dt");
  s.ratios = cfg.get_list("study.ratios");
  s.fit_max_ratio = cfg.get_double("study.fit_max_ratio");
  s.d12 = cfg.get_double("study.d12");
  s.d21 = cfg.get_double("study.d21");
  s.solver = solver_config(cfg);
  write_resolved(cfg);
  const LocalizationResult r = run_localization(s, run_options(cfg, s.solver));
  for (const auto& row : r.rows) {
    std::cout << "  delta/L=" << row.ratio << " W1 " << row.w1 << " L1 " << row.l1 << " Linf " << row.linf << "\n";
  }
  std::cout << "slopes (delta/L <= " << s.fit_max_ratio << "): W1 " << r.slope_w1 << " L1 " << r.slope_l1
            << " Linf " << r.slope_linf << "\n";
  std::cout << "slopes (all rows): W1 " << r.slope_w1_all << " L1 " << r.slope_l1_all << " Linf "
            << r.slope_linf_all << "\n";
  return 0;
}

int run_turing_cmd(const RunConfig& cfg, int dim) {
  TuringStudy s = default_turing_study(turing_case_from_string(cfg.get_string("study.case"), dim));
  if (dim == 1) {
    s.cells = cfg.get_int("study.cells");
    s.length = cfg.get_double("study.length");
    s.radius_factor = cfg.get_double("study.radius_factor");
  } else {
    s.nx = cfg.get_int("study.nx");
    s.ny = cfg.get_int("study.ny");
    s.lx = cfg.get_double("study.lx");
    s.ly = cfg.get_double("study.ly");
  }
  s.t_final = cfg.get_double("study.t_final");
  s.dt = cfg.get_double("study.dt");
  s.epsilon = cfg.get_double("study.epsilon");
  s.stationary_steps = cfg.get_int("study.stationary_steps");
  s.d1 = optional_double(cfg, "study.d1");
  s.d2 = optional_double(cfg, "study.d2");
  s.d21 = optional_double(cfg, "study.d21");
  s.solver = solver_config(cfg);
  write_resolved(cfg);
  const TuringResult r = run_turing(s, run_options(cfg, s.solver));
  std::cout << "case " << to_string(s.which) << ": equilibrium (" << r.eq1 << ", " << r.eq2 << ")\n"
            << "  unperturbed deviation after " << s.stationary_steps << " steps " << r.stationary_deviation << "\n"
            << "  final ||u1 - eq||_inf " << r.departure << ", u1 in [" << r.min1 << ", " << r.max1 << "], u2 in ["
            << r.min2 << ", " << r.max2 << "], extrema along x " << r.extrema << "\n";
  print_run_summary(r.run);
  return 0;
}

int run_kolmogorov(const RunConfig& cfg) {
  const int n = cfg.get_int("kolmogorov.cells");
  const double L = cfg.get_double("kolmogorov.length");
  const int steps = cfg.get_int("kolmogorov.steps");
  const double dt = cfg.get_double("kolmogorov.dt");
  const double a = cfg.get_double("kolmogorov.mu_amplitude");
  const double w = cfg.get_double("kolmogorov.mu_speed");
  const double za = cfg.get_double("kolmogorov.z_amplitude");
  if (steps < 1 || !(dt > 0.0)) throw ConfigError("kolmogorov.steps >= 1 and kolmogorov.dt > 0 required");
  if (!(std::abs(a) < 1.0) || !(std::abs(za) < 1.0)) throw ConfigError("amplitudes must lie in (-1, 1)");
  KolmogorovProblem p;
  p.grid = make_periodic_1d(n, L);
  p.dt = dt;
  p.z0 = cell_averages(Profile{ConstantTerm{1.0}, HarmonicTerm{za, 0.0}}, p.grid);
  DualProblem dual;
  for (int k = 1; k <= steps; ++k) {
    p.mu.push_back(cell_averages(Profile{ConstantTerm{1.0}, HarmonicTerm{a, w * k * dt - std::numbers::pi / 2}},
                                 p.grid));
    dual.sources.push_back(cell_averages(Profile{HarmonicTerm{1.0 + 0.1 * k, 0.0}}, p.grid));
  }
  write_resolved(cfg);
  const double gamma = *std::min_element(p.z0.begin(), p.z0.end());
  const double Gamma = *std::max_element(p.z0.begin(), p.z0.end());
  const LinfBoundsReport lb = linf_bounds_check(p, gamma, Gamma);
  const EnergyReport en = energy_estimate_check(p);
  const DualEstimateReport de = dual_estimate_check(p, dual);
  const DualityReport du = duality_inequality_check(p);
  std::ofstream out(out_file(cfg, "_table.csv"));
  out << "k,lower,upper,min_z,max_z,linf_pass,energy_lhs,energy_rhs,dual_lhs,dual_lhs_literal,dual_rhs\n";
  for (int k = 0; k <= steps; ++k) {
    out << k << ',' << format_double(lb.lower[k]) << ',' << format_double(lb.upper[k]) << ','
        << format_double(lb.min_z[k]) << ',' << format_double(lb.max_z[k]) << ',' << (lb.pass[k] ? 1 : 0) << ',';
    if (k >= 1 && en.applicable) out << format_double(en.lhs[k - 1]) << ',' << format_double(en.rhs[k - 1]);
    else out << ',';
    out << ',';
    if (k >= 1) {
      out << format_double(de.lhs[k - 1]) << ',' << format_double(de.lhs_literal[k - 1]) << ','
          << format_double(de.rhs);
    } else {
      out << ",,";
    }
    out << '\n';
  }
  out << "# duality," << format_double(du.lhs) << ',' << format_double(du.normalization) << ','
      << format_double(du.ratio) << '\n';
  std::cout << "L-inf bounds: " << (lb.applicable ? (lb.all_pass ? "pass" : "FAIL") : "not applicable") << "\n"
            << "energy estimate: " << (en.applicable ? (en.all_pass ? "pass" : "FAIL") : "not applicable") << "\n"
            << "dual estimate: " << (de.all_pass ? "pass" : "FAIL") << "\n"
            << "duality lhs " << du.lhs << ", ratio " << du.ratio << "\n";
  return 0;
}

int run_bounded(const RunConfig& cfg) {
  const int ell = cfg.get_int("bounded.cells");
  const int steps = cfg.get_int("bounded.steps");
  const double dt = cfg.get_double("bounded.dt");
  BoundedParams p;
  p.d1 = cfg.get_double("bounded.d1");
  p.d2 = cfg.get_double("bounded.d2");
  p.d12 = cfg.get_double("bounded.d12");
  p.d21 = cfg.get_double("bounded.d21");
  p.validate();
  const double a1 = cfg.get_double("bounded.amplitude1");
  const double a2 = cfg.get_double("bounded.amplitude2");
  if (!(std::abs(a1) < 1.0) || !(std::abs(a2) < 1.0)) throw ConfigError("amplitudes must lie in (-1, 1)");
  if (steps < 1 || !(dt > 0.0)) throw ConfigError("bounded.steps >= 1 and bounded.dt > 0 required");
  const SolverConfig solver = solver_config(cfg);
  const BoundedGrid1D grid(ell);
  State s{CellField(ell), CellField(ell), 0.0};
  const double pi = std::numbers::pi, h = grid.dx();
  for (int i = 0; i < ell; ++i) {
    const double x0 = i * h, x1 = (i + 1) * h;
    s.u1[i] = 1.0 + a1 * (std::sin(pi * x1) - std::sin(pi * x0)) / (pi * h);
    s.u2[i] = 1.0 + a2 * (std::sin(2 * pi * x1) - std::sin(2 * pi * x0)) / (2 * pi * h);
  }
  write_resolved(cfg);
  std::vector<State> traj{s};
  std::vector<double> residuals;
  for (int k = 1; k <= steps; ++k) {
    const StepOutcome o = bounded_step(traj.back(), dt, p, grid, solver);
    if (!o.converged) throw SolverFailure("bounded step " + std::to_string(k) + " failed: " + o.message);
    traj.push_back(o.state);
    residuals.push_back(o.final_residual);
  }
  const auto rows = bounded_entropy_check(traj, p, grid, dt, residuals);
  std::ofstream out(out_file(cfg, "_table.csv"));
  out << "k,lhs,tolerance,pass,mass1,mass2\n";
  bool all = true;
  for (const auto& r : rows) {
    double m1 = 0.0, m2 = 0.0;
    for (double v : traj[r.k].u1) m1 += h * v;
    for (double v : traj[r.k].u2) m2 += h * v;
    out << r.k << ',' << format_double(r.lhs) << ',' << format_double(r.tolerance) << ',' << (r.pass ? 1 : 0) << ','
        << format_double(m1) << ',' << format_double(m2) << '\n';
    all = all && r.pass;
  }
  std::cout << "entropy inequality on " << rows.size() << " steps: " << (all ? "pass" : "FAIL") << "\n";
  return 0;
}

int dispatch(const RunConfig& cfg) {
  const std::string& sub = cfg.subcommand();
  if (sub == "simulate") return run_simulate(cfg);
  if (sub == "converge") return run_converge(cfg);
  if (sub == "localize") return run_localize(cfg);
  if (sub == "turing1d") return run_turing_cmd(cfg, 1);
  if (sub == "turing2d") return run_turing_cmd(cfg, 2);
  if (sub == "kolmogorov-check") return run_kolmogorov(cfg);
  return run_bounded(cfg);
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv) {
  CLI::App app{"Finite volume solver for the nonlocal SKT cross-diffusion system"};
  app.require_subcommand(1);
  Flags flags;
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> blurbs{
      {"simulate", "one run with diagnostics and snapshots"},
      {"converge", "refinement ladder and fitted order"},
      {"localize", "nonlocal vs local distance over a delta sweep"},
      {"turing1d", "1D predator-prey pattern runs"},
      {"turing2d", "2D predator-prey pattern runs"},
      {"kolmogorov-check", "Kolmogorov bound, energy, dual and duality checks"},
      {"bounded-entropy", "Neumann-box scheme and its entropy inequality"}};
  for (const auto& name : RunConfig::subcommands()) {
    CLI::App* sc = app.add_subcommand(name, blurbs.at(name));
    sc->add_option("--config", flags.config_path, "INI configuration file");
    sc->add_option("--set", flags.assignments, "override one key: section.key=value")->take_all();
    sc->add_option("--out", flags.out, "output directory");
    if (name == "simulate" || name == "converge") sc->add_option("--kernel", flags.kernel, "kernel name");
    if (name == "simulate" || name == "converge" || name == "localize") {
      sc->add_option("--ic", flags.ic, "initial data: indicator | smooth");
    }
    if (name == "turing1d" || name == "turing2d") sc->add_option("--case", flags.which, "study case");
    if (name == "turing2d") sc->add_flag("--smoke", flags.smoke, "half resolution (67x50)");
    subs[name] = sc;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  std::string sub;
  for (const auto& [name, sc] : subs) {
    if (sc->parsed()) sub = name;
  }
  try {
    RunConfig cfg = RunConfig::defaults(sub);
    if (!flags.config_path.empty()) cfg.load_file(flags.config_path);
    if (!flags.out.empty()) cfg.set("output.dir", flags.out);
    if (!flags.kernel.empty()) {
      if (sub == "converge") {
        cfg.set("study.kernel", flags.kernel);
      } else {
        cfg.set("kernels.rho1", flags.kernel);
        cfg.set("kernels.rho2", flags.kernel);
      }
    }
    if (!flags.ic.empty()) cfg.set(sub == "simulate" ? "initial.preset" : "study.ic", flags.ic);
    if (!flags.which.empty()) cfg.set("study.case", flags.which);
    if (flags.smoke) {
      cfg.set("study.nx", "67");
      cfg.set("study.ny", "50");
    }
    for (const auto& a : flags.assignments) cfg.set_assignment(a);
    return dispatch(cfg);
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace nlskt
