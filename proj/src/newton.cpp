#include "nlskt/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlskt/errors.hpp"
#include "nlskt/linear.hpp"

namespace nlskt {

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(x));
  }
  return m;
}

double two_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

constexpr double kSwitch = 0.9;

double positive_update(double u, double du) {
  const double s = du / u;
  if (s >= -kSwitch) return u * (1.0 + s);
  const double v = u * (1.0 - kSwitch) * std::exp((s + kSwitch) / (1.0 - kSwitch));
  return std::max(v, std::numeric_limits<double>::min());
}

LinearSolverKind resolve_kind(const SolverConfig& cfg, const ImplicitProblem& p) {
  if (cfg.linear_solver != LinearSolverKind::Auto) return cfg.linear_solver;
  if (p.size() <= static_cast<std::size_t>(cfg.dense_max_unknowns)) return LinearSolverKind::DenseDirect;
  if (p.sparse_is_cheap()) return LinearSolverKind::BandedPlusLowRankDirect;
  return LinearSolverKind::KrylovMatrixFree;
}

}  // namespace

std::string to_string(LinearSolverKind kind) {
  switch (kind) {
    case LinearSolverKind::Auto:
      return "auto";
    case LinearSolverKind::DenseDirect:
      return "dense";
    case LinearSolverKind::BandedPlusLowRankDirect:
      return "banded";
    case LinearSolverKind::KrylovMatrixFree:
      return "krylov";
  }
  return "auto";
}

LinearSolverKind linear_solver_from_string(const std::string& name) {
  if (name == "auto") return LinearSolverKind::Auto;
  if (name == "dense") return LinearSolverKind::DenseDirect;
  if (name == "banded") return LinearSolverKind::BandedPlusLowRankDirect;
  if (name == "krylov") return LinearSolverKind::KrylovMatrixFree;
  throw ConfigError("unknown linear solver '" + name + "' (auto, dense, banded, krylov)");
}

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("solver max_iterations must be >= 1");
  if (max_dt_halvings < 0) throw ConfigError("solver max_dt_halvings must be >= 0");
  if (krylov_restart < 1 || krylov_max_iterations < 1) throw ConfigError("Krylov sizes must be >= 1");
  if (!(krylov_tol > 0.0)) throw ConfigError("Krylov tolerance must be positive");
  if (preconditioner != "auto" && preconditioner != "lu" && preconditioner != "ilut") {
    throw ConfigError("unknown preconditioner '" + preconditioner + "' (auto, lu, ilut)");
  }
  if (ilut_fill < 1 || !(ilut_droptol >= 0.0)) throw ConfigError("invalid incomplete LU parameters");
}

Eigen::MatrixXd ImplicitProblem::dense_jacobian() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd J(n, n);
  std::vector<double> e(size(), 0.0), col(size());
  for (Eigen::Index j = 0; j < n; ++j) {
    e[static_cast<std::size_t>(j)] = 1.0;
    apply_jacobian(e, col);
    e[static_cast<std::size_t>(j)] = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) J(i, j) = col[static_cast<std::size_t>(i)];
  }
  return J;
}

Eigen::SparseMatrix<double> ImplicitProblem::sparse_jacobian(bool) const { return dense_jacobian().sparseView(); }

NewtonResult solve_implicit(ImplicitProblem& problem, std::vector<double> guess, const SolverConfig& config,
                            NewtonWorkspace* workspace, double workspace_key) {
  config.validate();
  const std::size_t n = problem.size();
  if (guess.size() != n) throw ConfigError("first guess has the wrong size");
  for (double v : guess) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("first guess must be strictly positive");
  }
  NewtonWorkspace local;
  NewtonWorkspace& ws = workspace != nullptr ? *workspace : local;
  const LinearSolverKind kind = resolve_kind(config, problem);

  NewtonResult res;
  res.u = std::move(guess);
  std::vector<double> r(n), du(n), rhs(n);
  problem.residual(res.u, r);
  res.initial_residual = inf_norm(r);
  res.final_residual = res.initial_residual;
  if (!std::isfinite(res.initial_residual)) {
    res.message = "non-finite residual at the first guess";
    return res;
  }
  auto target_at = [&](std::span<const double> u) {
    return std::max(config.tolerance * res.initial_residual, problem.residual_floor(u));
  };
  if (res.initial_residual <= target_at(res.u)) {
    res.converged = true;
    return res;
  }

  for (int it = 1; it <= config.max_iterations; ++it) {
    problem.linearize(res.u);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -r[i];
    try {
      if (kind == LinearSolverKind::DenseDirect) {
        const Eigen::MatrixXd J = problem.dense_jacobian();
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(n));
        Eigen::Map<Eigen::VectorXd>(du.data(), static_cast<Eigen::Index>(n)) = lu.solve(b);
      } else if (kind == LinearSolverKind::BandedPlusLowRankDirect) {
        Eigen::SparseMatrix<double> J = problem.sparse_jacobian(true);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.analyzePattern(J);
        lu.factorize(J);
        if (lu.info() != Eigen::Success) throw SolverFailure("sparse LU factorization failed");
        Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(n));
        Eigen::Map<Eigen::VectorXd>(du.data(), static_cast<Eigen::Index>(n)) = lu.solve(b);
      } else {
        const bool exact = config.preconditioner == "lu" ||
                           (config.preconditioner == "auto" && problem.exact_precond_preferred());
        auto refactor = [&]() {
          Eigen::SparseMatrix<double> P = problem.sparse_jacobian(false);
          bool ok = true;
          ws.lu.reset();
          ws.ilut.reset();
          if (exact) {
            ws.lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
            ws.lu->analyzePattern(P);
            ws.lu->factorize(P);
            ok = ws.lu->info() == Eigen::Success;
          } else {
            ws.ilut = std::make_unique<Eigen::IncompleteLUT<double>>();
            ws.ilut->setFillfactor(config.ilut_fill);
            ws.ilut->setDroptol(config.ilut_droptol);
            ws.ilut->compute(P);
            ok = ws.ilut->info() == Eigen::Success;
          }
          if (!ok) {
            ws.reset();
            throw SolverFailure("preconditioner factorization failed");
          }
          ws.age = 0;
          ws.dt = workspace_key;
          ws.last_krylov_iterations = 0;
        };
        if ((!ws.lu && !ws.ilut) || ws.age >= config.precond_max_age || ws.dt != workspace_key ||
            ws.last_krylov_iterations > 40) {
          refactor();
        }
        const LinearMap apply_a = [&](std::span<const double> x, std::span<double> y) {
          problem.apply_jacobian(x, y);
        };
        const LinearMap apply_p = [&](std::span<const double> x, std::span<double> y) {
          Eigen::Map<const Eigen::VectorXd> xb(x.data(), static_cast<Eigen::Index>(x.size()));
          Eigen::Map<Eigen::VectorXd> yb(y.data(), static_cast<Eigen::Index>(y.size()));
          if (ws.lu) yb = ws.lu->solve(xb);
          else yb = ws.ilut->solve(xb);
        };
        const double rn = two_norm(r);
        const double inner =
            std::clamp(0.01 * target_at(res.u) / std::max(rn, std::numeric_limits<double>::min()), config.krylov_tol, 1e-2);
        std::fill(du.begin(), du.end(), 0.0);
        GmresResult g = gmres(apply_a, apply_p, rhs, du, config.krylov_restart, inner, config.krylov_max_iterations);
        ws.age += 1;
        ws.last_krylov_iterations = g.iterations;
        res.linear_iterations += g.iterations;
        if (!g.converged && ws.age > 1) {
          refactor();
          std::fill(du.begin(), du.end(), 0.0);
          g = gmres(apply_a, apply_p, rhs, du, config.krylov_restart, inner, config.krylov_max_iterations);
          ws.age += 1;
          ws.last_krylov_iterations = g.iterations;
          res.linear_iterations += g.iterations;
        }
        if (!g.converged) throw SolverFailure("GMRES did not converge");
      }
    } catch (const SolverFailure& e) {
      res.iterations = it;
      res.message = e.what();
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(du[i])) {
        res.iterations = it;
        res.message = "non-finite Newton update";
        return res;
      }
      res.u[i] = positive_update(res.u[i], du[i]);
    }
    problem.residual(res.u, r);
    res.iterations = it;
    res.final_residual = inf_norm(r);
    if (!std::isfinite(res.final_residual)) {
      res.message = "non-finite residual";
      return res;
    }
    if (res.final_residual <= target_at(res.u)) {
      res.converged = true;
      return res;
    }
  }
  res.message = "Newton iteration limit reached";
  return res;
}

std::vector<double> entropy_variables(const State& state, double d12, double d21) {
  if (!(d12 > 0.0) || !(d21 > 0.0)) throw DomainError("entropy variables need d12, d21 > 0");
  std::vector<double> x;
  x.reserve(state.u1.size() + state.u2.size());
  for (double v : state.u1) {
    if (!(v > 0.0)) throw DomainError("entropy variables need strictly positive densities");
    x.push_back(std::log(v) / d12);
  }
  for (double v : state.u2) {
    if (!(v > 0.0)) throw DomainError("entropy variables need strictly positive densities");
    x.push_back(std::log(v) / d21);
  }
  return x;
}

State state_from_entropy_variables(std::span<const double> x, double d12, double d21, double time) {
  if (!(d12 > 0.0) || !(d21 > 0.0)) throw DomainError("entropy variables need d12, d21 > 0");
  const std::size_t n = x.size() / 2;
  State s{CellField(n), CellField(n), time};
  for (std::size_t i = 0; i < n; ++i) {
    s.u1[i] = std::exp(d12 * x[i]);
    s.u2[i] = std::exp(d21 * x[n + i]);
  }
  return s;
}

SktStepProblem::SktStepProblem(const SktSystem& system, std::span<const double> previous, double dt)
    : system_(system), prev_(previous.begin(), previous.end()), dt_(dt) {
  if (prev_.size() != 2 * system.cells()) throw ConfigError("previous state does not match the system");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
}

void SktStepProblem::residual(std::span<const double> u, std::span<double> r) const {
  system_.residual(prev_, dt_, u, r);
}

double SktStepProblem::residual_floor(std::span<const double> u) const {
  return 64.0 * std::numeric_limits<double>::epsilon() * system_.residual_scale(prev_, dt_, u);
}

void SktStepProblem::linearize(std::span<const double> u) { lin_ = system_.linearize(u); }

void SktStepProblem::apply_jacobian(std::span<const double> v, std::span<double> out) const {
  system_.apply_jacobian(lin_, dt_, v, out);
}

Eigen::MatrixXd SktStepProblem::dense_jacobian() const { return system_.dense_jacobian(lin_, dt_); }

Eigen::SparseMatrix<double> SktStepProblem::sparse_jacobian(bool exact) const {
  return system_.sparse_jacobian(lin_, dt_, exact ? -1 : precond_radius_);
}

bool SktStepProblem::exact_precond_preferred() const { return system_.grid().dimension() == 1; }

bool SktStepProblem::sparse_is_cheap() const {
  return system_.grid().dimension() == 1 && system_.kernel_reach() <= 16;
}

std::vector<double> first_guess(const State& previous) {
  std::vector<double> x = pack(previous);
  const std::size_t n = previous.u1.size();
  auto mean = [](const CellField& f) {
    double s = 0.0;
    for (double v : f) s += v;
    return f.empty() ? 0.0 : s / static_cast<double>(f.size());
  };
  const double m1 = mean(previous.u1);
  const double m2 = mean(previous.u2);
  const double fallback = std::max({m1, m2, 1.0});
  const double f1 = 1e-14 * (m1 > 0.0 ? m1 : fallback);
  const double f2 = 1e-14 * (m2 > 0.0 ? m2 : fallback);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::max(x[i], f1);
    x[n + i] = std::max(x[n + i], f2);
  }
  return x;
}

StepOutcome newton_step_solve(const State& previous, double dt, const SktSystem& system, const SolverConfig& config,
                              NewtonWorkspace* workspace) {
  for (const CellField* f : {&previous.u1, &previous.u2}) {
    for (double v : *f) {
      if (!(v >= 0.0)) throw DomainError("previous state must be non-negative");
    }
  }
  const std::vector<double> prev = pack(previous);
  SktStepProblem problem(system, prev, dt);
  problem.set_precond_radius(system.grid().dimension() == 1 ? config.precond_radius_1d : config.precond_radius_2d);
  NewtonResult nr = solve_implicit(problem, first_guess(previous), config, workspace, dt);
  StepOutcome out;
  out.state = unpack(nr.u, previous.time + dt);
  out.iterations = nr.iterations;
  out.linear_iterations = nr.linear_iterations;
  out.initial_residual = nr.initial_residual;
  out.final_residual = nr.final_residual;
  out.dt_used = dt;
  out.dt_next = dt;
  out.converged = nr.converged;
  out.message = nr.message;
  return out;
}

StepOutcome newton_step_solve(const State& previous, double dt, const SchemeParams& params,
                              const SolverConfig& config) {
  SktSystem system(params);
  return newton_step_solve(previous, dt, system, config, nullptr);
}

AdvanceResult adaptive_advance(const State& initial, double t_final, double dt_initial, const StepFunction& step,
                               const SolverConfig& config, const AdvanceOptions& options) {
  config.validate();
  if (!(t_final > initial.time)) throw ConfigError("final time must exceed the initial time");
  if (!(dt_initial > 0.0)) throw ConfigError("time step must be positive");
  AdvanceResult result;
  result.final_state = initial;
  double dt_current = dt_initial;
  while (result.final_state.time < t_final) {
    const State& prev = result.final_state;
    const double remaining = t_final - prev.time;
    const bool last = remaining <= dt_current * (1.0 + 1e-6);
    double dt_try = last ? remaining : dt_current;
    int halvings = 0;
    StepOutcome outcome;
    while (true) {
      outcome = step(prev, dt_try);
      if (outcome.converged) break;
      if (halvings >= config.max_dt_halvings) {
        result.failure = "step at t=" + std::to_string(prev.time) + " failed after " + std::to_string(halvings) +
                         " halvings (dt=" + std::to_string(dt_try) + "): " + outcome.message;
        return result;
      }
      dt_try *= 0.5;
      ++halvings;
    }
    const bool reached_end = last && halvings == 0;
    outcome.state.time = reached_end ? t_final : prev.time + dt_try;
    outcome.dt_used = dt_try;
    outcome.halvings = halvings;
    if (halvings > 0) dt_current = std::min(2.0 * dt_try, dt_initial);
    outcome.dt_next = dt_current;
    if (options.observer) options.observer(prev, outcome);
    result.steps.push_back(StepStats{outcome.state.time, dt_try, outcome.iterations, outcome.linear_iterations,
                                     halvings, outcome.initial_residual, outcome.final_residual});
    if (options.keep_trajectory) result.trajectory.push_back(outcome.state);
    result.final_state = std::move(outcome.state);
  }
  result.completed = true;
  return result;
}

AdvanceResult adaptive_advance(const State& initial, double t_final, double dt_initial, const SchemeParams& params,
                               const SolverConfig& config, const AdvanceOptions& options) {
  SktSystem system(params);
  NewtonWorkspace ws;
  const StepFunction step = [&](const State& prev, double dt) {
    return newton_step_solve(prev, dt, system, config, &ws);
  };
  return adaptive_advance(initial, t_final, dt_initial, step, config, options);
}

}  // namespace nlskt
