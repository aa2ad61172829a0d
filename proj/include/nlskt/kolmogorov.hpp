#pragma once

#include <span>
#include <vector>

#include "nlskt/grid.hpp"
#include "nlskt/linear.hpp"

namespace nlskt {

// Implicit scheme (z^k - z^{k-1})/dt = Lap(mu^k z^k) on a 1D periodic grid.
// mu[k-1] holds mu^k for k = 1..n_steps.
struct KolmogorovProblem {
  PeriodicGrid grid;
  std::vector<CellField> mu;
  double dt = 0.0;
  CellField z0;

  std::size_t n_steps() const { return mu.size(); }
  void validate() const;
};

// Backward scheme (v^k - v^{k+1})/dt - mu^k Lap(v^k) = S^k with v^{N+1} = 0.
struct DualProblem {
  std::vector<CellField> sources;  // S^k, k = 1..n_steps
};

// diag 1 + 2 c mu_i, off-diagonals -c mu_{i-1}, -c mu_{i+1}, c = dt/dx^2; columns sum to 1.
PeriodicTridiagonal assemble_m_matrix(std::span<const double> mu, double dt, const PeriodicGrid& grid);

CellField forward_step(std::span<const double> z_prev, std::span<const double> mu_k, double dt,
                       const PeriodicGrid& grid);

// z^0 .. z^N
std::vector<CellField> solve_forward(const KolmogorovProblem& problem);

// Largest positive / negative part (in absolute value) of the discrete Laplacian of mu.
double laplacian_positive_part(std::span<const double> mu, const PeriodicGrid& grid);
double laplacian_negative_part(std::span<const double> mu, const PeriodicGrid& grid);

struct LinfBoundsReport {
  bool applicable = false;
  double dt_limit = 0.0;
  std::vector<double> lower;  // k = 0..N
  std::vector<double> upper;
  std::vector<double> min_z;
  std::vector<double> max_z;
  std::vector<bool> pass;
  bool all_pass = false;
};

// Product bounds from gamma <= z^0 <= Gamma; not applicable when dt >= dt_limit.
LinfBoundsReport linf_bounds_check(const KolmogorovProblem& problem, double gamma, double Gamma);

struct EnergyReport {
  bool applicable = false;
  std::vector<double> lhs;  // k = 1..N
  std::vector<double> rhs;
  bool all_pass = false;
};

// ||z^k||^2 + sum_{n<=k} dt sum_i (mu_i + mu_{i+1})(z_{i+1} - z_i)^2 / dx
//   <= prod_{n<=k} (1 - dt ||[Lap mu^n]_+||)^{-1} ||z^0||^2
EnergyReport energy_estimate_check(const KolmogorovProblem& problem);

// v^1 .. v^N by backward sweep of M^T V^k = V^{k+1} + dt S^k.
std::vector<CellField> dual_solve(const KolmogorovProblem& problem, const DualProblem& dual);

struct DualEstimateReport {
  std::vector<double> lhs;          // |v^k|_{1,2}^2 + sum_{n>=k} dt sum_i dx mu (Lap v)^2
  std::vector<double> lhs_literal;  // same with (Lap v)^2 / dx in place of dx (Lap v)^2
  double rhs = 0.0;                 // sum_n dt sum_i dx S^2 / mu
  bool all_pass = false;
};

DualEstimateReport dual_estimate_check(const KolmogorovProblem& problem, const DualProblem& dual);

struct DualityReport {
  double lhs = 0.0;           // (sum_k dt sum_i dx mu z^2)^{1/2}
  double mu_l1 = 0.0;         // sum_k dt sum_i dx mu
  double normalization = 0.0; // (1 + mu_l1^{1/2}) ||z^0||_{L2}
  double ratio = 0.0;
};

DualityReport duality_inequality_check(const KolmogorovProblem& problem);

// u0 * prod_{k<=n} (1 - dt a_k)^{-1}, n = 0..a.size().
std::vector<double> discrete_gronwall(double u0, std::span<const double> a, double dt);

}  // namespace nlskt
