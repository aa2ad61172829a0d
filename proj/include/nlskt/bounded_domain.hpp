#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <span>
#include <vector>

#include "nlskt/grid.hpp"
#include "nlskt/model.hpp"
#include "nlskt/newton.hpp"

namespace nlskt {

// Non-negative G on [0,1]^2 vanishing on the boundary.
struct BoundaryKernel {
  std::function<double(double, double)> g;

  // G(x_p, x_q) at interfaces p, q = 0..ell.
  Eigen::MatrixXd sample(const BoundedGrid1D& grid) const;
};

// sin(pi x) sin(pi y)
BoundaryKernel default_boundary_kernel();

struct BoundedParams {
  double d1 = 0.0, d2 = 0.0, d12 = 1.0, d21 = 1.0;
  BoundaryKernel kernel = default_boundary_kernel();

  void validate() const;
};

// Interface p = 0..ell sits between cells p-1 and p. Averages use the one-sided
// cell value at the boundary, differences vanish there.
struct BoundedMu {
  std::vector<double> mu2;        // at interfaces of species 1's flux
  std::vector<double> mu1;        // at interfaces of species 2's flux
  std::vector<double> mu2_tilde;
  std::vector<double> mu1_tilde;
};

BoundedMu bounded_mu(const State& state, const BoundedParams& params, const BoundedGrid1D& grid);

struct BoundedFluxes {
  std::vector<double> f1;  // size ell + 1, zero at both ends
  std::vector<double> f2;
};

BoundedFluxes bounded_fluxes(const State& state, const BoundedParams& params, const BoundedGrid1D& grid);

// (u - u_prev)/dt + (F_{i+1} - F_i)/dx per species.
std::pair<CellField, CellField> bounded_residual(const State& candidate, const State& previous, double dt,
                                                 const BoundedParams& params, const BoundedGrid1D& grid);

class BoundedStepProblem : public ImplicitProblem {
 public:
  BoundedStepProblem(const BoundedParams& params, const BoundedGrid1D& grid, std::span<const double> previous,
                     double dt);
  std::size_t size() const override { return prev_.size(); }
  void residual(std::span<const double> u, std::span<double> r) const override;
  double residual_floor(std::span<const double> u) const override;
  void linearize(std::span<const double> u) override { point_.assign(u.begin(), u.end()); }
  void apply_jacobian(std::span<const double> v, std::span<double> out) const override;

 private:
  void flux_parts(std::span<const double> a, std::span<const double> b, bool with_linear, std::span<double> f) const;

  BoundedParams params_;
  BoundedGrid1D grid_;
  Eigen::MatrixXd g_;
  std::vector<double> prev_;
  double dt_;
  std::vector<double> point_;
};

StepOutcome bounded_step(const State& previous, double dt, const BoundedParams& params, const BoundedGrid1D& grid,
                         const SolverConfig& config);

struct BoundedEntropyRow {
  int k = 0;
  double lhs = 0.0;  // (H^k - H^{k-1})/dt + squared-root dissipation terms
  double tolerance = 0.0;
  bool pass = false;
};

// trajectory[0] is the initial state; residuals[k-1] is the final Newton residual
// (inf norm) of step k, used for the solver slack.
std::vector<BoundedEntropyRow> bounded_entropy_check(std::span<const State> trajectory, const BoundedParams& params,
                                                     const BoundedGrid1D& grid, double dt,
                                                     std::span<const double> residuals);

double bounded_entropy(const State& state, const BoundedParams& params, const BoundedGrid1D& grid);

// (a - b)/(log a - log b), a for a == b.
double log_mean(double a, double b);

// The 2x2 matrix of the formal entropy argument for the pair of interfaces
// (u1 pair a, b) and (u2 pair c, d), row-major.
std::array<double, 4> entropy_coupling_matrix(double u1a, double u1b, double u2a, double u2b);

}  // namespace nlskt
