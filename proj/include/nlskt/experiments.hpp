#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlskt/diagnostics.hpp"
#include "nlskt/model.hpp"
#include "nlskt/newton.hpp"

namespace nlskt {

// Least-squares slope of log(y) against log(x).
double fit_order(std::span<const double> x, std::span<const double> y);

// Generic run with diagnostics, optional snapshots and file output.
struct RunOptions {
  DiagnosticsOptions diagnostics;
  std::vector<double> snapshot_times;
  std::string output_dir;  // empty: nothing written
  std::string name = "run";
  std::string run_label = "0";
};

struct RunOutput {
  State final_state;
  std::vector<DiagnosticsRecord> records;
  std::vector<State> snapshots;  // state at the first accepted time >= each snapshot time
  bool completed = false;
  std::string failure;
  double max_mass_drift = 0.0;
  bool mass_ok = true;
  bool entropy_checked = false;
  bool entropy_ok = true;
  bool positivity_ok = true;
  double duality_sum = 0.0;
  double seconds = 0.0;
};

RunOutput run_simulation(const SchemeParams& params, const State& initial, double t_final, double dt,
                         const SolverConfig& solver, const RunOptions& options = {});

// Test case 1 ingredients
enum class StudyKernel { Smooth, Indicator, Dirac };
enum class StudyData { Indicator, Smooth };

std::string to_string(StudyKernel k);
std::string to_string(StudyData d);
StudyKernel study_kernel_from_string(const std::string& s);
StudyData study_data_from_string(const std::string& s);

// chi[L/9, L/3], chi[L/3, 3L/4]  or  cos(nu x) + 1, sin(nu x) + 1
State study_initial_state(StudyData data, const PeriodicGrid& grid);

// rho1 = rho2 = rho, d1 = d2 = d11 = d22 = 0 unless overridden.
SchemeParams study_params(StudyKernel kernel, const PeriodicGrid& grid, double d12, double d21, double d1 = 0.0,
                          double d2 = 0.0);

struct ConvergenceStudy {
  StudyKernel kernel = StudyKernel::Smooth;
  StudyData data = StudyData::Indicator;
  double length = 25.0;
  double t_final = 5.0;
  int levels = 6;
  int base_cells = 32;
  double base_dt = 5.0;
  double d12 = 1.0, d21 = 2.0;
  double d1 = 0.0, d2 = 0.0;
  int fit_levels = 5;                // levels used in the regression, from the coarsest
  std::string aggregation = "max";   // max | sum | u1 | u2
  SolverConfig solver;
};

struct ConvergenceRow {
  int level = 0;
  int cells = 0;
  double dx = 0.0, dt = 0.0;
  double error = 0.0, error_u1 = 0.0, error_u2 = 0.0;
  double seconds = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;  // excludes the reference level
  double order = 0.0;
  std::vector<RunOutput> runs;       // all levels, reference last
  bool invariants_ok = true;
};

ConvergenceResult run_convergence(const ConvergenceStudy& study, const RunOptions& options = {});

struct LocalizationStudy {
  StudyData data = StudyData::Smooth;
  double length = 25.0;
  double t_final = 1.0;
  int cells = 1024;
  double dt = 1e-2;
  std::vector<double> ratios{1.0, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.04, 0.03, 0.02, 0.01, 0.005, 0.003};  // delta / L
  double fit_max_ratio = 0.05;
  double d12 = 1.0, d21 = 2.0;
  SolverConfig solver;
};

struct LocalizationRow {
  double ratio = 0.0, delta = 0.0;
  double w1 = 0.0, l1 = 0.0, linf = 0.0;  // summed over species
};

struct LocalizationResult {
  std::vector<LocalizationRow> rows;
  double slope_w1 = 0.0, slope_l1 = 0.0, slope_linf = 0.0;                 // ratio <= fit_max_ratio
  double slope_w1_all = 0.0, slope_l1_all = 0.0, slope_linf_all = 0.0;     // every row
  bool invariants_ok = true;
};

LocalizationResult run_localization(const LocalizationStudy& study, const RunOptions& options = {});

enum class TuringCase { LinearA, HuntingB, Linear2D, Symmetric2D, Quadrant2D };
std::string to_string(TuringCase c);
TuringCase turing_case_from_string(const std::string& s, int dimension);

struct TuringStudy {
  TuringCase which = TuringCase::LinearA;
  // 1D
  double length = 25.0;
  int cells = 500;
  double radius_factor = 10.0 / 49.0;  // r = factor * L
  // 2D
  double lx = 4.0, ly = 3.0;
  int nx = 133, ny = 100;

  double t_final = 500.0;
  double dt = 0.1;
  double epsilon = 1e-2;
  std::optional<double> d1, d2, d21;  // case defaults when empty
  int stationary_steps = 10;
  SolverConfig solver;
};

TuringStudy default_turing_study(TuringCase which);

struct TuringResult {
  double eq1 = 0.0, eq2 = 0.0;
  double stationary_deviation = 0.0;  // unperturbed run, inf-norm distance to equilibrium
  double departure = 0.0;             // final ||u1 - eq1||_inf
  double min1 = 0.0, max1 = 0.0, min2 = 0.0, max2 = 0.0;
  int extrema = 0;                    // strict local extrema of u1 along x (middle row in 2D)
  RunOutput run;
};

SchemeParams turing_params(const TuringStudy& study, const PeriodicGrid& grid);
PeriodicGrid turing_grid(const TuringStudy& study);
State turing_initial_state(const TuringStudy& study, const PeriodicGrid& grid, bool perturbed);

TuringResult run_turing(const TuringStudy& study, const RunOptions& options = {});

}  // namespace nlskt
