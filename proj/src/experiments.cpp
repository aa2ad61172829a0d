#include "nlskt/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nlskt/errors.hpp"
#include "nlskt/norms.hpp"

namespace nlskt {

namespace {

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

std::string time_label(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

double linf_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

CellField difference(std::span<const double> a, std::span<const double> b) {
  CellField d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

double fit_order(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit_order needs at least two points");
  double sx = 0.0, sy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("fit_order needs positive data");
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw DomainError("fit_order needs distinct abscissae");
  return sxy / sxx;
}

RunOutput run_simulation(const SchemeParams& params, const State& initial, double t_final, double dt,
                         const SolverConfig& solver, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  RunMonitor monitor(params, initial, options.diagnostics);
  RunOutput out;
  std::vector<double> times = options.snapshot_times;
  std::sort(times.begin(), times.end());
  std::size_t next = 0;
  auto capture = [&](const State& s) {
    while (next < times.size() && s.time >= times[next] - 1e-9 * dt) {
      out.snapshots.push_back(s);
      ++next;
    }
  };
  capture(initial);
  AdvanceOptions adv;
  adv.observer = [&](const State& previous, const StepOutcome& accepted) {
    monitor.observe(previous, accepted);
    capture(accepted.state);
  };
  const AdvanceResult res = adaptive_advance(initial, t_final, dt, params, solver, adv);
  out.final_state = res.final_state;
  out.completed = res.completed;
  out.failure = res.failure;
  out.records = monitor.records();
  out.max_mass_drift = monitor.max_mass_drift();
  out.mass_ok = monitor.mass_ok();
  out.entropy_checked = monitor.entropy_checked();
  out.entropy_ok = monitor.entropy_ok();
  out.positivity_ok = monitor.positivity_ok();
  out.duality_sum = monitor.duality_sum();
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!options.output_dir.empty()) {
    std::filesystem::create_directories(options.output_dir);
    DiagnosticsWriter w(join_path(options.output_dir, options.name + "_diag_" + options.run_label + ".csv"));
    w.write_all(out.records);
    for (std::size_t i = 0; i < out.snapshots.size(); ++i) {
      write_field_snapshot(join_path(options.output_dir, options.name + "_field_" + options.run_label + "_" +
                                                             time_label(times[i]) + ".csv"),
                           out.snapshots[i], params.grid());
    }
  }
  return out;
}

std::string to_string(StudyKernel k) {
  switch (k) {
    case StudyKernel::Smooth: return "smooth";
    case StudyKernel::Indicator: return "indicator";
    case StudyKernel::Dirac: return "dirac";
  }
  return "?";
}

std::string to_string(StudyData d) { return d == StudyData::Indicator ? "indicator" : "smooth"; }

StudyKernel study_kernel_from_string(const std::string& s) {
  if (s == "smooth") return StudyKernel::Smooth;
  if (s == "indicator") return StudyKernel::Indicator;
  if (s == "dirac") return StudyKernel::Dirac;
  throw ConfigError("unknown study kernel '" + s + "' (smooth, indicator, dirac)");
}

StudyData study_data_from_string(const std::string& s) {
  if (s == "indicator") return StudyData::Indicator;
  if (s == "smooth") return StudyData::Smooth;
  throw ConfigError("unknown initial data '" + s + "' (indicator, smooth)");
}

State study_initial_state(StudyData data, const PeriodicGrid& grid) {
  const double L = grid.lx();
  if (data == StudyData::Indicator) {
    return initial_state(Profile{BoxTerm{1.0, L / 9.0, L / 3.0}}, Profile{BoxTerm{1.0, L / 3.0, 3.0 * L / 4.0}},
                         grid);
  }
  return initial_state(Profile{ConstantTerm{1.0}, HarmonicTerm{1.0, 0.0}},
                       Profile{ConstantTerm{1.0}, HarmonicTerm{1.0, -std::numbers::pi / 2.0}}, grid);
}

SchemeParams study_params(StudyKernel kernel, const PeriodicGrid& grid, double d12, double d21, double d1,
                          double d2) {
  KernelSpec spec = DiracKernel{};
  if (kernel == StudyKernel::Smooth) spec = SmoothCosKernel{};
  if (kernel == StudyKernel::Indicator) spec = IndicatorKernel{grid.lx() / 4.0};
  const DiscreteKernel rho = discretize(spec, grid);
  const DiscreteKernel dirac = DiscreteKernel::dirac(grid);
  DiffusionCoefficients c;
  c.d1 = d1;
  c.d2 = d2;
  c.d12 = d12;
  c.d21 = d21;
  return make_scheme_params(c, dirac, dirac, rho, rho);
}

ConvergenceResult run_convergence(const ConvergenceStudy& study, const RunOptions& options) {
  if (study.levels < 3) throw ConfigError("convergence study needs at least 3 levels");
  if (study.fit_levels < 2 || study.fit_levels > study.levels - 1) {
    throw ConfigError("fit_levels must lie in [2, levels - 1]");
  }
  if (study.aggregation != "max" && study.aggregation != "sum" && study.aggregation != "u1" &&
      study.aggregation != "u2") {
    throw ConfigError("aggregation must be max, sum, u1 or u2");
  }
  ConvergenceResult result;
  std::vector<PeriodicGrid> grids;
  std::vector<double> dts;
  for (int k = 0; k < study.levels; ++k) {
    const int n = study.base_cells << k;
    grids.push_back(make_periodic_1d(n, study.length));
    dts.push_back(study.base_dt * std::pow(4.0, -k));
    const SchemeParams params = study_params(study.kernel, grids.back(), study.d12, study.d21, study.d1, study.d2);
    const State init = study_initial_state(study.data, grids.back());
    RunOptions ro = options;
    ro.run_label = "N" + std::to_string(n);
    ro.diagnostics.tolerance = study.solver.tolerance;
    RunOutput run = run_simulation(params, init, study.t_final, dts.back(), study.solver, ro);
    if (!run.completed) throw SolverFailure("convergence run N=" + std::to_string(n) + " failed: " + run.failure);
    result.invariants_ok = result.invariants_ok && run.mass_ok && run.positivity_ok && run.entropy_ok;
    result.runs.push_back(std::move(run));
  }
  const State& ref = result.runs.back().final_state;
  for (int k = 0; k + 1 < study.levels; ++k) {
    ConvergenceRow row;
    row.level = k + 1;
    row.cells = grids[k].nx();
    row.dx = grids[k].dx();
    row.dt = dts[k];
    row.seconds = result.runs[k].seconds;
    const State& s = result.runs[k].final_state;
    row.error_u1 = linf_diff(s.u1, project_to_coarser(ref.u1, grids[k]));
    row.error_u2 = linf_diff(s.u2, project_to_coarser(ref.u2, grids[k]));
    if (study.aggregation == "max") row.error = std::max(row.error_u1, row.error_u2);
    else if (study.aggregation == "sum") row.error = row.error_u1 + row.error_u2;
    else if (study.aggregation == "u1") row.error = row.error_u1;
    else row.error = row.error_u2;
    result.rows.push_back(row);
  }
  std::vector<double> xs, ys;
  for (int k = 0; k < study.fit_levels; ++k) {
    xs.push_back(result.rows[k].dx);
    ys.push_back(result.rows[k].error);
  }
  result.order = fit_order(xs, ys);

  if (!options.output_dir.empty()) {
    std::ofstream t(join_path(options.output_dir, options.name + "_table.csv"));
    t << "level,cells,dx,dt,error,error_u1,error_u2,seconds\n";
    for (const auto& r : result.rows) {
      t << r.level << ',' << r.cells << ',' << format_double(r.dx) << ',' << format_double(r.dt) << ','
        << format_double(r.error) << ',' << format_double(r.error_u1) << ',' << format_double(r.error_u2) << ','
        << format_double(r.seconds) << '\n';
    }
    t << "# order," << format_double(result.order) << '\n';
  }
  return result;
}

LocalizationResult run_localization(const LocalizationStudy& study, const RunOptions& options) {
  if (study.ratios.empty()) throw ConfigError("localization study needs at least one delta");
  for (double r : study.ratios) {
    if (!(r > 0.0) || r > 1.0) throw ConfigError("delta / L must lie in (0, 1]");
  }
  const PeriodicGrid grid = make_periodic_1d(study.cells, study.length);
  const State init = study_initial_state(study.data, grid);
  LocalizationResult result;
  RunOptions base = options;
  base.diagnostics.tolerance = study.solver.tolerance;

  RunOptions ro = base;
  ro.run_label = "dirac";
  const RunOutput local =
      run_simulation(study_params(StudyKernel::Dirac, grid, study.d12, study.d21), init, study.t_final, study.dt,
                     study.solver, ro);
  if (!local.completed) throw SolverFailure("local baseline failed: " + local.failure);
  result.invariants_ok = local.mass_ok && local.positivity_ok && local.entropy_ok;

  const DiscreteKernel dirac = DiscreteKernel::dirac(grid);
  for (double ratio : study.ratios) {
    const double delta = ratio * study.length;
    DiffusionCoefficients c;
    c.d12 = study.d12;
    c.d21 = study.d21;
    const DiscreteKernel rho = discretize(IndicatorKernel{delta}, grid);
    const SchemeParams params = make_scheme_params(c, dirac, dirac, rho, rho);
    ro = base;
    ro.run_label = "delta" + time_label(ratio);
    const RunOutput run = run_simulation(params, init, study.t_final, study.dt, study.solver, ro);
    if (!run.completed) throw SolverFailure("localization run delta/L=" + time_label(ratio) + " failed");
    result.invariants_ok = result.invariants_ok && run.mass_ok && run.positivity_ok && run.entropy_ok;
    LocalizationRow row;
    row.ratio = ratio;
    row.delta = delta;
    const State& a = run.final_state;
    const State& b = local.final_state;
    row.w1 = wasserstein1(a.u1, b.u1, grid) + wasserstein1(a.u2, b.u2, grid);
    row.l1 = lp_norm(difference(a.u1, b.u1), grid, 1.0) + lp_norm(difference(a.u2, b.u2), grid, 1.0);
    row.linf = linf_diff(a.u1, b.u1) + linf_diff(a.u2, b.u2);
    result.rows.push_back(row);
  }

  auto slope = [&](bool windowed, double LocalizationRow::*field) {
    std::vector<double> xs, ys;
    for (const auto& r : result.rows) {
      if (windowed && r.ratio > study.fit_max_ratio * (1.0 + 1e-12)) continue;
      if (!(r.*field > 0.0)) continue;
      xs.push_back(r.ratio);
      ys.push_back(r.*field);
    }
    return xs.size() >= 2 ? fit_order(xs, ys) : std::nan("");
  };
  result.slope_w1 = slope(true, &LocalizationRow::w1);
  result.slope_l1 = slope(true, &LocalizationRow::l1);
  result.slope_linf = slope(true, &LocalizationRow::linf);
  result.slope_w1_all = slope(false, &LocalizationRow::w1);
  result.slope_l1_all = slope(false, &LocalizationRow::l1);
  result.slope_linf_all = slope(false, &LocalizationRow::linf);

  if (!options.output_dir.empty()) {
    std::ofstream t(join_path(options.output_dir, options.name + "_table.csv"));
    t << "delta_over_L,delta,w1,l1,linf\n";
    for (const auto& r : result.rows) {
      t << format_double(r.ratio) << ',' << format_double(r.delta) << ',' << format_double(r.w1) << ','
        << format_double(r.l1) << ',' << format_double(r.linf) << '\n';
    }
    t << "# slope_window," << format_double(result.slope_w1) << ',' << format_double(result.slope_l1) << ','
      << format_double(result.slope_linf) << '\n';
    t << "# slope_all," << format_double(result.slope_w1_all) << ',' << format_double(result.slope_l1_all) << ','
      << format_double(result.slope_linf_all) << '\n';
  }
  return result;
}

std::string to_string(TuringCase c) {
  switch (c) {
    case TuringCase::LinearA: return "linear";
    case TuringCase::HuntingB: return "hunting";
    case TuringCase::Linear2D: return "linear";
    case TuringCase::Symmetric2D: return "sym";
    case TuringCase::Quadrant2D: return "quadrant";
  }
  return "?";
}

TuringCase turing_case_from_string(const std::string& s, int dimension) {
  if (dimension == 1) {
    if (s == "linear" || s == "A" || s == "a") return TuringCase::LinearA;
    if (s == "hunting" || s == "B" || s == "b") return TuringCase::HuntingB;
    throw ConfigError("unknown 1D Turing case '" + s + "' (linear, hunting)");
  }
  if (s == "linear") return TuringCase::Linear2D;
  if (s == "sym" || s == "symmetric") return TuringCase::Symmetric2D;
  if (s == "quadrant" || s == "nonsym") return TuringCase::Quadrant2D;
  throw ConfigError("unknown 2D Turing case '" + s + "' (linear, sym, quadrant)");
}

namespace {

bool is_2d(TuringCase c) {
  return c == TuringCase::Linear2D || c == TuringCase::Symmetric2D || c == TuringCase::Quadrant2D;
}

std::pair<double, double> equilibrium(const ReactionSpec& r) {
  if (const auto* s = std::get_if<SegelLevin>(&r)) {
    const double den = s->b * s->c - s->d * s->e;
    return {s->a * s->d / den, s->a * s->c / den};
  }
  const auto& m = std::get<MimuraNishiuraYamaguti>(r);
  const double root = std::sqrt(m.b * m.b * m.c * m.c - 2.0 * m.b * m.c * m.e * m.g + 4.0 * m.d * m.f * m.b * m.g +
                                m.e * m.e * m.g * m.g + 4.0 * m.a * m.d * m.g * m.g);
  const double num = m.c * root - m.b * m.c * m.c + m.c * m.e * m.g - 2.0 * m.d * m.f * m.g;
  return {(m.f + num / (2.0 * m.d * m.g)) / m.c, num / (2.0 * m.d * m.g * m.g)};
}

int count_extrema(std::span<const double> row) {
  const std::size_t n = row.size();
  int count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = row[(i + n - 1) % n], c = row[i], r = row[(i + 1) % n];
    if ((c > l && c > r) || (c < l && c < r)) ++count;
  }
  return count;
}

}  // namespace

TuringStudy default_turing_study(TuringCase which) {
  TuringStudy s;
  s.which = which;
  if (is_2d(which)) {
    s.t_final = 20.0;
    s.dt = 0.01;
  }
  return s;
}

PeriodicGrid turing_grid(const TuringStudy& study) {
  return is_2d(study.which) ? make_periodic_2d(study.nx, study.ny, study.lx, study.ly)
                            : make_periodic_1d(study.cells, study.length);
}

SchemeParams turing_params(const TuringStudy& study, const PeriodicGrid& grid) {
  DiffusionCoefficients c;
  c.d12 = 0.0;
  const DiscreteKernel dirac = DiscreteKernel::dirac(grid);
  DiscreteKernel rho2 = dirac;
  ReactionSpec reaction;
  switch (study.which) {
    case TuringCase::LinearA:
      c.d1 = 0.05, c.d2 = 2.0, c.d21 = 0.0;
      reaction = SegelLevin{};
      break;
    case TuringCase::HuntingB:
      c.d1 = 0.05, c.d2 = 0.0, c.d21 = 1.0;
      reaction = SegelLevin{};
      rho2 = discretize(HuntingKernel{study.radius_factor * study.length}, grid);
      break;
    case TuringCase::Linear2D:
      c.d1 = 0.001, c.d2 = 4.0, c.d21 = 0.0;
      reaction = MimuraNishiuraYamaguti{};
      break;
    case TuringCase::Symmetric2D:
    case TuringCase::Quadrant2D:
      c.d1 = 0.001, c.d2 = 0.0, c.d21 = 2.0 / 5.0;
      reaction = MimuraNishiuraYamaguti{};
      rho2 = discretize(AnnulusKernel{3.0 / 8.0, 0.5, study.which == TuringCase::Quadrant2D}, grid);
      break;
  }
  if (study.d1) c.d1 = *study.d1;
  if (study.d2) c.d2 = *study.d2;
  if (study.d21) c.d21 = *study.d21;
  return make_scheme_params(c, dirac, dirac, dirac, rho2, reaction);
}

State turing_initial_state(const TuringStudy& study, const PeriodicGrid& grid, bool perturbed) {
  const SchemeParams p = turing_params(study, grid);
  const auto [e1, e2] = equilibrium(p.reaction);
  Profile u1{ConstantTerm{e1}};
  if (perturbed) {
    if (grid.dimension() == 1) {
      u1.push_back(BoxTerm{study.epsilon, grid.lx() / 9.0, grid.lx() / 3.0});
    } else {
      u1.push_back(BoxTerm{study.epsilon, grid.lx() / 9.0, 4.0 * grid.lx() / 9.0, 7.0 * grid.ly() / 9.0,
                           8.0 * grid.ly() / 9.0});
    }
  }
  return initial_state(u1, Profile{ConstantTerm{e2}}, grid);
}

TuringResult run_turing(const TuringStudy& study, const RunOptions& options) {
  const PeriodicGrid grid = turing_grid(study);
  const SchemeParams params = turing_params(study, grid);
  TuringResult result;
  std::tie(result.eq1, result.eq2) = equilibrium(params.reaction);

  if (study.stationary_steps > 0) {
    const State flat = turing_initial_state(study, grid, false);
    double dev = 0.0;
    AdvanceOptions adv;
    adv.observer = [&](const State&, const StepOutcome& acc) {
      for (double v : acc.state.u1) dev = std::max(dev, std::abs(v - result.eq1));
      for (double v : acc.state.u2) dev = std::max(dev, std::abs(v - result.eq2));
    };
    const AdvanceResult r =
        adaptive_advance(flat, study.stationary_steps * study.dt, study.dt, params, study.solver, adv);
    if (!r.completed) throw SolverFailure("stationary run failed: " + r.failure);
    result.stationary_deviation = dev;
  }

  RunOptions ro = options;
  ro.run_label = to_string(study.which);
  ro.diagnostics.tolerance = study.solver.tolerance;
  result.run = run_simulation(params, turing_initial_state(study, grid, true), study.t_final, study.dt,
                              study.solver, ro);
  if (!result.run.completed) throw SolverFailure("Turing run failed: " + result.run.failure);
  const State& s = result.run.final_state;
  for (double v : s.u1) result.departure = std::max(result.departure, std::abs(v - result.eq1));
  result.min1 = *std::min_element(s.u1.begin(), s.u1.end());
  result.max1 = *std::max_element(s.u1.begin(), s.u1.end());
  result.min2 = *std::min_element(s.u2.begin(), s.u2.end());
  result.max2 = *std::max_element(s.u2.begin(), s.u2.end());
  const std::size_t nx = static_cast<std::size_t>(grid.nx());
  const std::size_t row = grid.dimension() == 1 ? 0 : static_cast<std::size_t>(grid.ny() / 2);
  result.extrema = count_extrema(std::span<const double>(s.u1).subspan(row * nx, nx));

  if (!options.output_dir.empty()) {
    std::ofstream t(join_path(options.output_dir, options.name + "_table.csv"), std::ios::app);
    t.seekp(0, std::ios::end);
    if (t.tellp() == 0) t << "case,eq1,eq2,stationary_deviation,departure,min1,max1,min2,max2,extrema,seconds\n";
    t << to_string(study.which) << ',' << format_double(result.eq1) << ',' << format_double(result.eq2) << ','
      << format_double(result.stationary_deviation) << ',' << format_double(result.departure) << ','
      << format_double(result.min1) << ',' << format_double(result.max1) << ',' << format_double(result.min2)
      << ',' << format_double(result.max2) << ',' << result.extrema << ',' << format_double(result.run.seconds)
      << '\n';
  }
  return result;
}

}  // namespace nlskt
