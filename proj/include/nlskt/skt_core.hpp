#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <span>
#include <utility>
#include <vector>

#include "nlskt/model.hpp"

namespace nlskt {

struct MuFields {
  CellField mu1;
  CellField mu2;
};

MuFields mu(const State& state, const SchemeParams& params);

// sum over axes of (w_{i+e} - 2 w_i + w_{i-e}) / h^2, periodic.
CellField discrete_laplacian(std::span<const double> w, const PeriodicGrid& grid);
void discrete_laplacian(std::span<const double> w, const PeriodicGrid& grid, std::span<double> out);

// Interface fluxes per axis; entry i of axis a is the flux through the face between
// cell i and its +e_a neighbour.
struct Fluxes {
  std::vector<CellField> f1;
  std::vector<CellField> f2;
};

// (u_i mu_i - u_{i+1} mu_{i+1}) / h
Fluxes fluxes(const State& state, const SchemeParams& params);

// mu_{i+1/2} (u_i - u_{i+1}) / h + u_{i+1/2} (mu_i - mu_{i+1}) / h with centred averages.
Fluxes centered_fluxes(const State& state, const SchemeParams& params);

std::pair<CellField, CellField> reaction(const State& state, const ReactionSpec& spec);

// (u^k - u^{k-1})/dt - Lap(mu u^k) - R(u^k), per species.
std::pair<CellField, CellField> step_residual(const State& candidate, const State& previous, double dt,
                                              const SchemeParams& params);

struct MaxPrincipleBounds {
  double lower = 0.0;  // e_k
  double upper = 0.0;  // E_k
  double rate = 0.0;   // B
  double dt_limit = 0.0;
  bool applicable = false;
};

// Lower/upper bounds after k steps from gamma <= u^0 <= Gamma, masses m1, m2.
// applicable is false when dt >= dt_limit (upper is then +inf).
MaxPrincipleBounds max_principle_bounds(const SchemeParams& params, double mass1, double mass2, double gamma,
                                        double Gamma, double dt, int k);

// sum_k dt sum_i V (mu1 u1 + mu2 u2)(u1 + u2) over the supplied states.
double duality_functional(std::span<const State> trajectory, const SchemeParams& params, double dt);

// (1 + T A)(||u1^0||^2 + ||u2^0||^2) with A the duality-estimate constant.
double duality_normalizer(const State& initial, const SchemeParams& params, double t_final);

// Pack [u1 | u2] and back.
std::vector<double> pack(const State& s);
State unpack(std::span<const double> x, double time = 0.0);

// Implicit-step operator on packed unknowns, with the quantities frozen at a
// linearization point.
class SktSystem {
 public:
  explicit SktSystem(SchemeParams params);

  const SchemeParams& params() const { return params_; }
  const PeriodicGrid& grid() const { return params_.grid(); }
  std::size_t cells() const { return grid().size(); }

  void compute_mu(std::span<const double> u1, std::span<const double> u2, std::span<double> mu1,
                  std::span<double> mu2) const;

  void residual(std::span<const double> u_prev, double dt, std::span<const double> u, std::span<double> r) const;

  // Magnitude of the residual's summands, for a rounding-level floor.
  double residual_scale(std::span<const double> u_prev, double dt, std::span<const double> u) const;

  struct Linearization {
    std::vector<double> u;
    CellField mu1, mu2;
    std::vector<ReactionPoint> dr;
  };
  Linearization linearize(std::span<const double> u) const;

  void apply_jacobian(const Linearization& lin, double dt, std::span<const double> v, std::span<double> out) const;
  Eigen::MatrixXd dense_jacobian(const Linearization& lin, double dt) const;
  // Kernel offsets with |m| <= radius (per axis) only; radius < 0 keeps all offsets.
  Eigen::SparseMatrix<double> sparse_jacobian(const Linearization& lin, double dt, int radius) const;

  // Largest |offset| per axis among non-zero taps of the active kernels.
  int kernel_reach() const;

 private:
  struct Coupling {
    int kernel;  // 0 sigma1, 1 sigma2, 2 rho1, 3 rho2
    double coeff;
    int target;  // species whose mu is affected (0 or 1)
    int source;  // species convolved
  };
  const DiscreteKernel& kernel(int id) const;

  SchemeParams params_;
  std::vector<Coupling> couplings_;
};

}  // namespace nlskt
