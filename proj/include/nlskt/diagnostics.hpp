#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "nlskt/model.hpp"
#include "nlskt/newton.hpp"

namespace nlskt {

struct DiagnosticsRecord {
  int k = 0;
  double time = 0.0;
  double mass1 = 0.0, mass2 = 0.0;
  std::optional<double> entropy;  // absent when d12 or d21 is 0
  std::optional<double> dissipation;
  std::optional<double> entropy_balance;  // H^k + dt D^k - H^{k-1}
  double epsilon_solver = 0.0;
  double min1 = 0.0, max1 = 0.0, min2 = 0.0, max2 = 0.0;
  int newton_iterations = 0;
  int linear_iterations = 0;
  int halvings = 0;
  double dt = 0.0;
  double final_residual = 0.0;
  double duality_partial = 0.0;  // running sum of dt sum V (mu1 u1 + mu2 u2)(u1 + u2)
};

// Slack allowed in the entropy inequality for an inexact solve:
// 10 dt |Omega| ||r||_inf (1 + ||log u||_inf) / min(d12, d21) plus a rounding term.
double epsilon_solver(double dt, double residual_inf, const State& state, const SchemeParams& params,
                      double entropy_scale);

double total_mass(std::span<const double> u, const PeriodicGrid& grid);

DiagnosticsRecord record(const State& previous, const State& current, const SchemeParams& params, double dt,
                         const StepStats& stats, bool compute_dissipation);

// Default opt-in rule for the O(N^2)-type dissipation functional.
bool dissipation_by_default(const PeriodicGrid& grid);

struct DiagnosticsOptions {
  std::optional<bool> compute_dissipation;  // default: dissipation_by_default
  bool check_entropy = true;                 // only acted on when the hypotheses hold
  double tolerance = 1e-10;                  // Newton tolerance, for the mass check
};

// Collects records over a run and tracks the structural invariants.
class RunMonitor {
 public:
  RunMonitor(const SchemeParams& params, const State& initial, DiagnosticsOptions options);

  StepObserver observer();
  void observe(const State& previous, const StepOutcome& accepted);

  const std::vector<DiagnosticsRecord>& records() const { return records_; }
  double max_mass_drift() const { return max_mass_drift_; }  // relative
  bool mass_ok() const;
  bool entropy_checked() const { return entropy_checked_; }
  bool entropy_ok() const { return entropy_ok_; }
  bool positivity_ok() const { return positivity_ok_; }
  double duality_sum() const { return duality_; }

 private:
  SchemeParams params_;
  DiagnosticsOptions options_;
  bool dissipation_;
  bool entropy_checked_;
  bool reaction_free_;
  double mass0_1_, mass0_2_;
  double max_mass_drift_ = 0.0;
  bool entropy_ok_ = true;
  bool positivity_ok_ = true;
  double duality_ = 0.0;
  std::vector<DiagnosticsRecord> records_;
};

// k,t,mass1,mass2,H,D,entropy_balance,min1,max1,min2,max2,newton_iters,dt
class DiagnosticsWriter {
 public:
  explicit DiagnosticsWriter(const std::string& path);
  void write(const DiagnosticsRecord& r);
  void write_all(const std::vector<DiagnosticsRecord>& rs);

 private:
  std::ofstream out_;
};

// Columns x[,y],u1,u2 at cell centres.
void write_field_snapshot(const std::string& path, const State& state, const PeriodicGrid& grid);

// Scientific notation, 17 significant digits.
std::string format_double(double v);

}  // namespace nlskt
