#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <Eigen/IterativeLinearSolvers>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nlskt/model.hpp"
#include "nlskt/skt_core.hpp"

namespace nlskt {

enum class LinearSolverKind { Auto, DenseDirect, BandedPlusLowRankDirect, KrylovMatrixFree };

std::string to_string(LinearSolverKind kind);
LinearSolverKind linear_solver_from_string(const std::string& name);

struct SolverConfig {
  double tolerance = 1e-10;
  int max_iterations = 50;
  int max_dt_halvings = 20;
  LinearSolverKind linear_solver = LinearSolverKind::Auto;
  // Auto: dense LU up to this many unknowns, exact sparse LU when the kernels are
  // compact, preconditioned GMRES otherwise.
  int dense_max_unknowns = 512;
  int krylov_restart = 60;
  double krylov_tol = 1e-13;
  int krylov_max_iterations = 1000;
  // Kernel offsets kept in the GMRES preconditioner (per axis); 1D / 2D.
  int precond_radius_1d = 2;
  int precond_radius_2d = 0;
  // Reuse a preconditioner factorization for at most this many Newton iterations.
  int precond_max_age = 12;
  // Preconditioner factorization: "auto" (exact sparse LU in 1D, incomplete LU in 2D), "lu", "ilut".
  std::string preconditioner = "auto";
  int ilut_fill = 8;
  double ilut_droptol = 1e-5;

  void validate() const;
};

// Root-finding problem F(u) = 0 on positive unknowns.
class ImplicitProblem {
 public:
  virtual ~ImplicitProblem() = default;
  virtual std::size_t size() const = 0;
  virtual void residual(std::span<const double> u, std::span<double> r) const = 0;
  // Residual level that rounding alone produces at u.
  virtual double residual_floor(std::span<const double> u) const {
    (void)u;
    return 0.0;
  }
  // Freeze the Jacobian at u; later apply/assemble calls refer to this point.
  virtual void linearize(std::span<const double> u) = 0;
  virtual void apply_jacobian(std::span<const double> v, std::span<double> out) const = 0;
  virtual Eigen::MatrixXd dense_jacobian() const;
  // exact = false may drop far couplings (preconditioner use).
  virtual Eigen::SparseMatrix<double> sparse_jacobian(bool exact) const;
  // Whether the exact sparse Jacobian is cheap (compact couplings).
  virtual bool sparse_is_cheap() const { return false; }
  // Whether exact factorization of the preconditioning matrix is affordable.
  virtual bool exact_precond_preferred() const { return true; }
};

// Preconditioner factorization carried across Newton iterations and steps.
struct NewtonWorkspace {
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu;
  std::unique_ptr<Eigen::IncompleteLUT<double>> ilut;
  int age = 0;
  double dt = 0.0;
  int last_krylov_iterations = 0;
  void reset() {
    lu.reset();
    ilut.reset();
    age = 0;
    last_krylov_iterations = 0;
  }
};

struct NewtonResult {
  std::vector<double> u;
  int iterations = 0;
  int linear_iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  bool converged = false;
  std::string message;
};

// Newton's method on u with a positivity-preserving update: with s = du/u,
// u <- u (1 + s) for s >= -0.9 and u <- 0.1 u exp((s + 0.9)/0.1) below.
// Converged when ||F||_inf <= max(tol * ||F(guess)||_inf, floor).
NewtonResult solve_implicit(ImplicitProblem& problem, std::vector<double> guess, const SolverConfig& config,
                            NewtonWorkspace* workspace = nullptr, double workspace_key = 0.0);

// X = (log u1 / d12, log u2 / d21)
std::vector<double> entropy_variables(const State& state, double d12, double d21);
State state_from_entropy_variables(std::span<const double> x, double d12, double d21, double time = 0.0);

// One implicit SKT step as an ImplicitProblem.
class SktStepProblem : public ImplicitProblem {
 public:
  SktStepProblem(const SktSystem& system, std::span<const double> previous, double dt);
  std::size_t size() const override { return prev_.size(); }
  void residual(std::span<const double> u, std::span<double> r) const override;
  double residual_floor(std::span<const double> u) const override;
  void linearize(std::span<const double> u) override;
  void apply_jacobian(std::span<const double> v, std::span<double> out) const override;
  Eigen::MatrixXd dense_jacobian() const override;
  Eigen::SparseMatrix<double> sparse_jacobian(bool exact) const override;
  bool sparse_is_cheap() const override;
  bool exact_precond_preferred() const override;

  void set_precond_radius(int r) { precond_radius_ = r; }

 private:
  const SktSystem& system_;
  std::vector<double> prev_;
  double dt_;
  SktSystem::Linearization lin_;
  int precond_radius_ = 2;
};

struct StepOutcome {
  State state;
  int iterations = 0;
  int linear_iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  double dt_used = 0.0;
  double dt_next = 0.0;
  int halvings = 0;
  bool converged = false;
  std::string message;
};

// First guess max(previous, 1e-14 * mean density) per species.
std::vector<double> first_guess(const State& previous);

StepOutcome newton_step_solve(const State& previous, double dt, const SchemeParams& params,
                              const SolverConfig& config);
StepOutcome newton_step_solve(const State& previous, double dt, const SktSystem& system,
                              const SolverConfig& config, NewtonWorkspace* workspace);

using StepFunction = std::function<StepOutcome(const State& previous, double dt)>;
using StepObserver = std::function<void(const State& previous, const StepOutcome& accepted)>;

struct StepStats {
  double time = 0.0;
  double dt_used = 0.0;
  int iterations = 0;
  int linear_iterations = 0;
  int halvings = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;
};

struct AdvanceOptions {
  bool keep_trajectory = false;
  StepObserver observer;
};

struct AdvanceResult {
  State final_state;
  std::vector<State> trajectory;  // accepted states after the initial one, if kept
  std::vector<StepStats> steps;
  bool completed = false;
  std::string failure;
};

// dt halves on a failed step (at most max_dt_halvings times in a row); after a step
// that needed halving the next dt is doubled, capped at dt_initial; the last step is
// shortened to land on t_final.
AdvanceResult adaptive_advance(const State& initial, double t_final, double dt_initial, const StepFunction& step,
                               const SolverConfig& config, const AdvanceOptions& options = {});
AdvanceResult adaptive_advance(const State& initial, double t_final, double dt_initial, const SchemeParams& params,
                               const SolverConfig& config, const AdvanceOptions& options = {});

}  // namespace nlskt
