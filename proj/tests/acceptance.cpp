// Acceptance checks, one PASS/FAIL line per criterion.
//   acceptance [--full] [--only 1,3,...]
// --full runs the 2D Turing cases at 133x100 instead of the 67x50 smoke grid.

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nlskt/bounded_domain.hpp"
#include "nlskt/diagnostics.hpp"
#include "nlskt/experiments.hpp"
#include "nlskt/kolmogorov.hpp"
#include "nlskt/norms.hpp"
#include "nlskt/skt_core.hpp"
#include "oracles.hpp"

using namespace nlskt;

namespace {

struct Verdict {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / *lo;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// 1. ----------------------------------------------------------------------------------------
Verdict structural_invariants() {
  std::mt19937 rng(20240611);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int runs = 50;
  int bad_mass = 0, bad_entropy = 0, bad_pos = 0, failed = 0, steps_total = 0;
  double worst_mass = 0.0, worst_entropy_margin = -1e300;
  for (int run = 0; run < runs; ++run) {
    const int n = std::array<int, 3>{8, 16, 32}[run % 3];
    const double L = run % 2 == 0 ? 1.0 : 25.0;
    const auto g = make_periodic_1d(n, L);
    const bool diffusive = run % 4 != 3;
    DiffusionCoefficients c;
    c.d1 = diffusive ? 0.05 + u01(rng) : 0.0;
    c.d2 = diffusive ? 0.05 + u01(rng) : 0.0;
    c.d11 = u01(rng) < 0.5 ? 0.0 : u01(rng);
    c.d22 = u01(rng) < 0.5 ? 0.0 : u01(rng);
    c.d12 = 0.1 + 2.0 * u01(rng);
    c.d21 = 0.1 + 2.0 * u01(rng);
    // even self-interaction kernels
    auto even_kernel = [&](int which) -> KernelSpec {
      switch (which % 4) {
        case 0: return DiracKernel{};
        case 1: return SmoothCosKernel{};
        case 2: return IndicatorKernel{L * (0.05 + 0.9 * u01(rng))};
        default: return HuntingKernel{L * (0.02 + 0.2 * u01(rng))};
      }
    };
    std::uniform_int_distribution<int> pick(0, 4);
    const int r = pick(rng);
    KernelSpec rho_spec;
    if (r == 4) {
      // a non-even cross kernel; the other one is its reflection
      const double phase = 2 * std::numbers::pi * u01(rng);
      rho_spec = CustomKernel{[L, phase](double x, double) { return 1.0 + 0.8 * std::sin(2 * std::numbers::pi * x / L + phase); },
                              true, "shifted"};
    } else {
      rho_spec = even_kernel(r);
    }
    const DiscreteKernel rho = discretize(rho_spec, g);
    const SchemeParams p = make_scheme_params(c, discretize(even_kernel(pick(rng)), g),
                                              discretize(even_kernel(pick(rng)), g), rho, rho.reflected());
    if (!satisfies_entropy_hypotheses(p)) {
      ++failed;
      continue;
    }
    State s{CellField(n), CellField(n), 0.0};
    for (int i = 0; i < n; ++i) {
      // some runs start with vacuum in part of the domain
      s.u1[i] = (run % 5 == 0 && u01(rng) < 0.3) ? 0.0 : 2.0 * u01(rng);
      s.u2[i] = (run % 5 == 0 && u01(rng) < 0.3) ? 0.0 : 2.0 * u01(rng);
    }
    const double dt = L * L * (0.001 + 0.02 * u01(rng));
    SolverConfig solver;
    DiagnosticsOptions dopt;
    dopt.compute_dissipation = true;
    dopt.tolerance = solver.tolerance;
    RunMonitor mon(p, s, dopt);
    AdvanceOptions adv;
    adv.observer = mon.observer();
    const AdvanceResult res = adaptive_advance(s, 6 * dt, dt, p, solver, adv);
    if (!res.completed) {
      ++failed;
      continue;
    }
    const double m1 = total_mass(s.u1, g), m2 = total_mass(s.u2, g);
    for (const auto& rec : mon.records()) {
      ++steps_total;
      const double drift = std::max(std::abs(rec.mass1 - m1) / m1, std::abs(rec.mass2 - m2) / m2);
      worst_mass = std::max(worst_mass, drift);
      if (drift > 10.0 * solver.tolerance) ++bad_mass;
      const double margin = *rec.entropy_balance - rec.epsilon_solver;
      worst_entropy_margin = std::max(worst_entropy_margin, *rec.entropy_balance);
      if (margin > 0.0) ++bad_entropy;
      if (diffusive && !(rec.min1 > 0.0 && rec.min2 > 0.0)) ++bad_pos;
    }
  }
  Verdict v;
  v.pass = failed == 0 && bad_mass == 0 && bad_entropy == 0 && bad_pos == 0;
  v.summary = std::to_string(runs) + " random runs, " + std::to_string(steps_total) + " steps; mass/entropy/positivity violations " +
              std::to_string(bad_mass) + "/" + std::to_string(bad_entropy) + "/" + std::to_string(bad_pos) +
              ", failed runs " + std::to_string(failed);
  v.details.push_back("max relative mass drift " + fmt(worst_mass) + " (limit " + fmt(10 * SolverConfig{}.tolerance) +
                      "), largest H^k + dt D^k - H^{k-1} " + fmt(worst_entropy_margin));
  return v;
}

// 2. ----------------------------------------------------------------------------------------
Verdict oracle_equivalence() {
  std::mt19937 rng(8);
  const auto g = make_periodic_1d(8, 25.0);
  double worst_step = 0.0;
  std::vector<SchemeParams> cases;
  auto d = DiscreteKernel::dirac(g);
  cases.push_back(make_scheme_params({0, 0, 0, 0, 1.0, 2.0}, d, d, d, d));
  auto sm = discretize(SmoothCosKernel{}, g);
  cases.push_back(make_scheme_params({0.1, 0.1, 0.2, 0.3, 1.0, 2.0}, sm, sm, sm, sm));
  auto ind = discretize(IndicatorKernel{25.0 / 4}, g);
  cases.push_back(make_scheme_params({0, 0, 0, 0, 1.0, 2.0}, d, d, ind, ind));
  for (const auto& p : cases) {
    State prev{oracle::random_positive(rng, 8), oracle::random_positive(rng, 8), 0.0};
    SolverConfig cfg;
    cfg.tolerance = 1e-13;
    const StepOutcome out = newton_step_solve(prev, 0.5, p, cfg);
    const State ref = oracle::dense_newton(prev, 0.5, p);
    worst_step = std::max({worst_step, out.converged ? 0.0 : 1e300, max_abs_diff(out.state.u1, ref.u1),
                           max_abs_diff(out.state.u2, ref.u2)});
  }
  // Kolmogorov forward and dual steps
  double worst_k = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const auto mu = oracle::random_positive(rng, 8, 0.0, 3.0);
    const auto z = oracle::random_positive(rng, 8, 0.0, 2.0);
    const Eigen::MatrixXd M = oracle::m_matrix(mu, 0.3, g.dx());
    const Eigen::Map<const Eigen::VectorXd> zv(z.data(), 8);
    const Eigen::VectorXd fwd = M.fullPivLu().solve(zv);
    const CellField f = forward_step(z, mu, 0.3, g);
    KolmogorovProblem kp{g, {mu}, 0.3, z};
    const auto v = dual_solve(kp, DualProblem{{z}});
    const Eigen::VectorXd dual = M.transpose().fullPivLu().solve(0.3 * zv);
    for (int i = 0; i < 8; ++i) {
      worst_k = std::max({worst_k, std::abs(f[i] - fwd[i]), std::abs(v[0][i] - dual[i])});
    }
  }
  Verdict v;
  v.pass = worst_step <= 1e-9 && worst_k <= 1e-12;
  v.summary = "SKT step vs dense oracle max diff " + fmt(worst_step) + " (tol 1e-9), Kolmogorov forward/dual " +
              fmt(worst_k) + " (tol 1e-12)";
  return v;
}

// 3. ----------------------------------------------------------------------------------------
Verdict convergence_table() {
  struct Cell {
    StudyKernel kernel;
    StudyData data;
    double order, error;
  };
  const std::vector<Cell> cells{{StudyKernel::Smooth, StudyData::Indicator, 1.97, 5e-3},
                                {StudyKernel::Indicator, StudyData::Indicator, 1.53, 7e-2},
                                {StudyKernel::Dirac, StudyData::Indicator, 1.04, 2.7e-3},
                                {StudyKernel::Smooth, StudyData::Smooth, 2.32, 4.9e-4},
                                {StudyKernel::Indicator, StudyData::Smooth, 2.02, 9.2e-4},
                                {StudyKernel::Dirac, StudyData::Smooth, 2.32, 5e-4}};
  Verdict v;
  v.pass = true;
  int ok = 0;
  for (const auto& c : cells) {
    ConvergenceStudy s;
    s.kernel = c.kernel;
    s.data = c.data;
    const ConvergenceResult r = run_convergence(s);
    const double e512 = r.rows.back().error;
    const bool order_ok = std::abs(r.order - c.order) <= 0.3;
    const bool err_ok = e512 <= 3 * c.error && e512 >= c.error / 3;
    const bool good = order_ok && err_ok && r.invariants_ok;
    ok += good;
    v.pass = v.pass && good;
    double secs = 0.0;
    for (const auto& run : r.runs) secs += run.seconds;
    v.details.push_back(to_string(c.kernel) + "/" + to_string(c.data) + ": order " + fmt(r.order) + " (published " +
                        fmt(c.order) + "), N=512 error " + fmt(e512, 3) + " (published " + fmt(c.error, 3) + ")" +
                        (good ? "" : "  <-- outside tolerance") + ", " + fmt(secs, 3) + " s");
  }
  v.summary = std::to_string(ok) + "/6 kernel/initial-data cells within order +-0.3 and N=512 error factor 3";
  return v;
}

// 4. ----------------------------------------------------------------------------------------
Verdict localization_slopes() {
  Verdict v;
  LocalizationStudy smooth;
  smooth.data = StudyData::Smooth;
  const LocalizationResult rs = run_localization(smooth);
  LocalizationStudy ind;
  ind.data = StudyData::Indicator;
  const LocalizationResult ri = run_localization(ind);
  const bool s_ok = std::abs(rs.slope_w1 - 2.0) <= 0.2 && std::abs(rs.slope_l1 - 2.0) <= 0.2 &&
                    std::abs(rs.slope_linf - 2.0) <= 0.2;
  const bool w1_ok = std::abs(ri.slope_w1 - 0.65) <= 0.15;
  const bool l1_ok = std::abs(ri.slope_l1 - 0.38) <= 0.15;
  double lo = 1e300, hi = 0.0;
  for (const auto& r : ri.rows) {
    lo = std::min(lo, r.linf);
    hi = std::max(hi, r.linf);
  }
  const bool linf_ok = lo >= 0.5 && hi <= 2.0;
  v.pass = s_ok && w1_ok && l1_ok && linf_ok && rs.invariants_ok && ri.invariants_ok;
  v.summary = "smooth IC slopes W1/L1/Linf " + fmt(rs.slope_w1) + "/" + fmt(rs.slope_l1) + "/" + fmt(rs.slope_linf) +
              "; indicator IC W1 " + fmt(ri.slope_w1) + ", L1 " + fmt(ri.slope_l1) + ", Linf range [" + fmt(lo) + ", " +
              fmt(hi) + "]";
  v.details.push_back(std::string("smooth 2.0+-0.2: ") + (s_ok ? "ok" : "FAIL") + "; indicator W1 0.65+-0.15: " +
                      (w1_ok ? "ok" : "FAIL") + "; indicator L1 0.38+-0.15: " + (l1_ok ? "ok" : "FAIL") +
                      "; Linf in [0.5, 2]: " + (linf_ok ? "ok" : "FAIL"));
  v.details.push_back("fit window delta/L <= 0.05; slopes over all rows: smooth " + fmt(rs.slope_w1_all) + "/" +
                      fmt(rs.slope_l1_all) + "/" + fmt(rs.slope_linf_all) + ", indicator " + fmt(ri.slope_w1_all) +
                      "/" + fmt(ri.slope_l1_all) + "/" + fmt(ri.slope_linf_all));
  for (const auto* res : {&rs, &ri}) {
    std::string line = res == &rs ? "smooth IC    " : "indicator IC ";
    for (const auto& r : res->rows) line += " " + fmt(r.ratio, 3) + ":" + fmt(r.w1, 3) + "/" + fmt(r.l1, 3) + "/" + fmt(r.linf, 3);
    v.details.push_back(line + "  (delta/L: W1/L1/Linf)");
  }
  return v;
}

// 5. ----------------------------------------------------------------------------------------
Verdict maximum_principle() {
  const double L = 25.0;
  const auto g = make_periodic_1d(128, L);
  auto k = discretize(SmoothCosKernel{}, g);
  const SchemeParams p = make_scheme_params({0.0, 0.0, 0.05, 0.05, 1.0, 2.0}, k, k, k, k);
  const State s = initial_state({ConstantTerm{1.0}, HarmonicTerm{0.5, 0.0}},
                                {ConstantTerm{1.0}, HarmonicTerm{0.5, -std::numbers::pi / 2}}, g);
  const double gamma = std::min(*std::min_element(s.u1.begin(), s.u1.end()), *std::min_element(s.u2.begin(), s.u2.end()));
  const double Gamma = std::max(*std::max_element(s.u1.begin(), s.u1.end()), *std::max_element(s.u2.begin(), s.u2.end()));
  const double m1 = total_mass(s.u1, g), m2 = total_mass(s.u2, g);
  const double limit = max_principle_bounds(p, m1, m2, gamma, Gamma, 1.0, 0).dt_limit;
  const double dt = 0.5 * limit;
  const int steps = 50;
  SolverConfig solver;
  solver.tolerance = 1e-12;
  int violations = 0;
  double min_gap = 1e300;
  State cur = s;
  bool applicable = true;
  for (int kstep = 0; kstep <= steps; ++kstep) {
    if (kstep > 0) {
      const StepOutcome o = newton_step_solve(cur, dt, p, solver);
      if (!o.converged) return {false, "solver failed at step " + std::to_string(kstep), {}};
      cur = o.state;
    }
    const auto b = max_principle_bounds(p, m1, m2, gamma, Gamma, dt, kstep);
    applicable = applicable && b.applicable;
    for (const CellField* f : {&cur.u1, &cur.u2}) {
      const auto [lo, hi] = std::minmax_element(f->begin(), f->end());
      if (*lo < b.lower || *hi > b.upper) ++violations;
      min_gap = std::min({min_gap, *lo - b.lower, b.upper - *hi});
    }
  }
  Verdict v;
  v.pass = applicable && violations == 0;
  v.summary = "N=128, 50 steps, dt = " + fmt(dt) + " (limit " + fmt(limit) + "): " + std::to_string(violations) +
              " bound violations, smallest slack " + fmt(min_gap);
  return v;
}

// 6. ----------------------------------------------------------------------------------------
KolmogorovProblem kolmogorov_problem(int n, double t_final, int steps, DualProblem& dual) {
  KolmogorovProblem p;
  p.grid = make_periodic_1d(n, 1.0);
  p.dt = t_final / steps;
  p.z0 = cell_averages({ConstantTerm{1.0}, HarmonicTerm{0.5, 0.0}}, p.grid);
  dual.sources.clear();
  for (int k = 1; k <= steps; ++k) {
    p.mu.push_back(cell_averages({ConstantTerm{1.0}, HarmonicTerm{0.5, 5.0 * k * p.dt - std::numbers::pi / 2}}, p.grid));
    dual.sources.push_back(cell_averages({HarmonicTerm{1.0 + 0.1 * k, 0.0}}, p.grid));
  }
  return p;
}

Verdict kolmogorov_suite() {
  Verdict v;
  v.pass = true;
  std::vector<double> ratios;
  for (int n : {32, 64, 128}) {
    DualProblem dual;
    const KolmogorovProblem p = kolmogorov_problem(n, 0.02, 20, dual);
    const double gamma = *std::min_element(p.z0.begin(), p.z0.end());
    const double Gamma = *std::max_element(p.z0.begin(), p.z0.end());
    const auto lb = linf_bounds_check(p, gamma, Gamma);
    const auto en = energy_estimate_check(p);
    const auto de = dual_estimate_check(p, dual);
    const auto du = duality_inequality_check(p);
    ratios.push_back(du.ratio);
    const bool ok = n == 128 || (lb.applicable && lb.all_pass && en.applicable && en.all_pass && de.all_pass);
    v.pass = v.pass && ok;
    v.details.push_back("N=" + std::to_string(n) + ": Linf bounds " + (lb.applicable ? (lb.all_pass ? "pass" : "FAIL") : "n/a") +
                        ", energy " + (en.applicable ? (en.all_pass ? "pass" : "FAIL") : "n/a") + ", dual " +
                        (de.all_pass ? "pass" : "FAIL") + ", duality lhs " + fmt(du.lhs) + " ratio " + fmt(du.ratio));
  }
  const double sp = spread(ratios);
  v.pass = v.pass && sp < 0.2;
  v.summary = "bounds/energy/dual estimates on N=32,64; duality ratio spread over N=32,64,128 " + fmt(sp) + " (limit 0.2)";
  return v;
}

// 7. ----------------------------------------------------------------------------------------
Verdict duality_functional_check() {
  Verdict v;
  std::vector<double> normalized;
  for (int level : {2, 3, 4}) {
    const int n = 32 << (level - 1);
    const double dt = 5.0 / std::pow(4.0, level - 1);
    const auto g = make_periodic_1d(n, 25.0);
    const SchemeParams p = study_params(StudyKernel::Smooth, g, 1.0, 2.0, 0.01, 0.01);
    const State s = study_initial_state(StudyData::Smooth, g);
    AdvanceOptions adv;
    adv.keep_trajectory = true;
    const AdvanceResult r = adaptive_advance(s, 5.0, dt, p, SolverConfig{}, adv);
    if (!r.completed) return {false, "run failed: " + r.failure, {}};
    const double f = duality_functional(r.trajectory, p, dt);
    const double norm = duality_normalizer(s, p, 5.0);
    normalized.push_back(f / norm);
    v.details.push_back("N=" + std::to_string(n) + ": functional " + fmt(f) + ", normalized " + fmt(f / norm));
  }
  const double sp = spread(normalized);
  v.pass = sp < 0.3;
  v.summary = "normalized duality functional spread over N=64,128,256 " + fmt(sp) + " (limit 0.3)";
  return v;
}

// 8. ----------------------------------------------------------------------------------------
Verdict turing(bool full) {
  Verdict v;
  v.pass = true;
  std::vector<CellField> finals;
  for (TuringCase c : {TuringCase::LinearA, TuringCase::HuntingB, TuringCase::Linear2D, TuringCase::Symmetric2D,
                       TuringCase::Quadrant2D}) {
    TuringStudy s = default_turing_study(c);
    const bool two_d = c == TuringCase::Linear2D || c == TuringCase::Symmetric2D || c == TuringCase::Quadrant2D;
    if (two_d && !full) {
      s.nx = 67;
      s.ny = 50;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const TuringResult r = run_turing(s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool stationary = r.stationary_deviation <= 1e-8;
    const bool departs = r.departure > 10 * s.epsilon;
    const bool timely = !two_d || full || secs < 300.0;
    v.pass = v.pass && stationary && departs && timely;
    if (c == TuringCase::Symmetric2D || c == TuringCase::Quadrant2D) finals.push_back(r.run.final_state.u1);
    v.details.push_back((two_d ? "2D " : "1D ") + to_string(c) + (two_d ? " " + std::to_string(s.nx) + "x" + std::to_string(s.ny) : "") +
                        ": equilibrium (" + fmt(r.eq1) + ", " + fmt(r.eq2) + ") drift " + fmt(r.stationary_deviation) +
                        ", departure " + fmt(r.departure) + ", u1 in [" + fmt(r.min1) + ", " + fmt(r.max1) + "], " +
                        std::to_string(r.extrema) + " extrema, " + fmt(secs, 3) + " s");
  }
  const double diff = max_abs_diff(finals[0], finals[1]);
  v.pass = v.pass && diff > 0.1;
  v.summary = std::string(full ? "full" : "smoke") + " resolution; symmetric vs quadrant final u1 differ by " + fmt(diff) +
              " (limit 0.1)";
  return v;
}

// 9. ----------------------------------------------------------------------------------------
Verdict bounded_domain_check() {
  const int ell = 32, steps = 20;
  const double dt = 1e-3;
  const BoundedGrid1D grid(ell);
  BoundedParams p;
  p.d1 = 0.1;
  p.d2 = 0.1;
  State s{CellField(ell), CellField(ell), 0.0};
  const double pi = std::numbers::pi, h = grid.dx();
  for (int i = 0; i < ell; ++i) {
    const double x0 = i * h, x1 = (i + 1) * h;
    s.u1[i] = 1.0 + 0.5 * (std::sin(pi * x1) - std::sin(pi * x0)) / (pi * h);
    s.u2[i] = 1.0 + 0.3 * (std::sin(2 * pi * x1) - std::sin(2 * pi * x0)) / (2 * pi * h);
  }
  std::vector<State> traj{s};
  std::vector<double> res;
  SolverConfig solver;
  for (int k = 0; k < steps; ++k) {
    const StepOutcome o = bounded_step(traj.back(), dt, p, grid, solver);
    if (!o.converged) return {false, "bounded step failed: " + o.message, {}};
    traj.push_back(o.state);
    res.push_back(o.final_residual);
  }
  const auto rows = bounded_entropy_check(traj, p, grid, dt, res);
  int entropy_fail = 0;
  double worst = -1e300;
  for (const auto& r : rows) {
    entropy_fail += !r.pass;
    worst = std::max(worst, r.lhs);
  }
  auto mass = [&](const CellField& u) {
    double m = 0.0;
    for (double x : u) m += h * x;
    return m;
  };
  double drift = 0.0;
  for (const auto& st : traj) {
    drift = std::max({drift, std::abs(mass(st.u1) - mass(s.u1)) / mass(s.u1), std::abs(mass(st.u2) - mass(s.u2)) / mass(s.u2)});
  }
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> d(1e-3, 10.0);
  int mat_fail = 0;
  double worst_det = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto a = entropy_coupling_matrix(d(rng), d(rng), d(rng), d(rng));
    const double det = (a[0] * a[3] - a[1] * a[2]) / (std::abs(a[0] * a[3]) + std::abs(a[1] * a[2]));
    worst_det = std::max(worst_det, std::abs(det));
    if (std::abs(det) > 1e-12 || !(a[0] + a[3] > 0.0)) ++mat_fail;
  }
  Verdict v;
  v.pass = entropy_fail == 0 && drift <= 10 * solver.tolerance && mat_fail == 0;
  v.summary = "ell=32, 20 steps: entropy inequality failures " + std::to_string(entropy_fail) + " (largest lhs " +
              fmt(worst) + "), mass drift " + fmt(drift) + ", matrix det/trace failures " + std::to_string(mat_fail) +
              " (max relative det " + fmt(worst_det) + ")";
  return v;
}

// 10. ---------------------------------------------------------------------------------------
Verdict gronwall() {
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int fails = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + static_cast<int>(u01(rng) * 50);
    std::vector<double> a(n);
    for (auto& x : a) x = 5.0 * u01(rng);
    const double amax = *std::max_element(a.begin(), a.end());
    const double dt = (amax > 0.0 ? 0.99 / amax : 1.0) * u01(rng) + 1e-6;
    const double u0 = 3.0 * u01(rng);
    const auto bound = discrete_gronwall(u0, a, dt);
    // u_n = u0 + dt sum_{k<=n} a_k u_k, solved forward for u_n
    std::vector<double> u{u0};
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const double un = (u0 + dt * acc) / (1.0 - dt * a[k]);
      acc += a[k] * un;
      u.push_back(un);
    }
    for (int k = 0; k <= n; ++k) {
      const double rel = (u[k] - bound[k]) / std::max(bound[k], 1e-300);
      worst = std::max(worst, rel);
      if (rel > 1e-12) ++fails;
    }
  }
  Verdict v;
  v.pass = fails == 0;
  v.summary = "100 random (a, dt): " + std::to_string(fails) + " violations, largest (u_n - bound)/bound " + fmt(worst);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  bool full = false;
  std::vector<int> only;
  app.add_flag("--full", full, "2D Turing runs at 133x100");
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected(only.begin(), only.end());

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"structural invariants", structural_invariants},
      {"oracle equivalence", oracle_equivalence},
      {"convergence table", convergence_table},
      {"localization slopes", localization_slopes},
      {"maximum principle", maximum_principle},
      {"Kolmogorov estimates", kolmogorov_suite},
      {"duality functional", duality_functional_check},
      {"Turing patterns", [full] { return turing(full); }},
      {"bounded domain", bounded_domain_check},
      {"discrete Gronwall", gronwall}};

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what(), {}};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first << "): " << v.summary
              << " [" << fmt(secs, 3) << " s]" << std::endl;
    for (const auto& d : v.details) std::cout << "    " << d << "\n";
    std::cout.flush();
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
