#include "nlskt/bounded_domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nlskt/errors.hpp"
#include "nlskt/norms.hpp"

namespace nlskt {

namespace {

double average_at(std::span<const double> u, int p, int ell) {
  if (p <= 0) return u[0];
  if (p >= ell) return u[static_cast<std::size_t>(ell - 1)];
  return 0.5 * (u[static_cast<std::size_t>(p - 1)] + u[static_cast<std::size_t>(p)]);
}

double difference_at(std::span<const double> u, int p, int ell) {
  if (p <= 0 || p >= ell) return 0.0;
  return u[static_cast<std::size_t>(p - 1)] - u[static_cast<std::size_t>(p)];
}

void require_state(const State& s, const BoundedGrid1D& g) {
  const auto n = static_cast<std::size_t>(g.n_cells());
  if (s.u1.size() != n || s.u2.size() != n) throw ConfigError("state does not match the bounded grid");
}

}  // namespace

Eigen::MatrixXd BoundaryKernel::sample(const BoundedGrid1D& grid) const {
  if (!g) throw ConfigError("boundary kernel has no function");
  const int m = grid.n_cells() + 1;
  Eigen::MatrixXd out(m, m);
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      const double v = g(grid.interface_position(p), grid.interface_position(q));
      if (!(v >= -1e-14)) throw ConfigError("boundary kernel must be non-negative");
      out(p, q) = std::max(v, 0.0);
    }
  }
  return out;
}

BoundaryKernel default_boundary_kernel() {
  return BoundaryKernel{[](double x, double y) { return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y); }};
}

void BoundedParams::validate() const {
  if (!(d1 >= 0.0) || !(d2 >= 0.0)) throw ConfigError("d1, d2 must be >= 0");
  if (!(d12 > 0.0) || !(d21 > 0.0)) throw ConfigError("d12, d21 must be > 0");
  if (!kernel.g) throw ConfigError("boundary kernel has no function");
}

BoundedMu bounded_mu(const State& state, const BoundedParams& params, const BoundedGrid1D& grid) {
  params.validate();
  require_state(state, grid);
  const int ell = grid.n_cells();
  const double dx = grid.dx();
  const Eigen::MatrixXd G = params.kernel.sample(grid);
  BoundedMu m;
  m.mu2.assign(static_cast<std::size_t>(ell + 1), 0.0);
  m.mu1 = m.mu2;
  m.mu2_tilde = m.mu2;
  m.mu1_tilde = m.mu2;
  for (int p = 0; p <= ell; ++p) {
    for (int q = 0; q <= ell; ++q) {
      m.mu2[p] += dx * G(p, q) * average_at(state.u2, q, ell);
      m.mu2_tilde[p] += G(p, q) * difference_at(state.u2, q, ell);
      // species 2's interface is the second argument of G
      m.mu1[p] += dx * G(q, p) * average_at(state.u1, q, ell);
      m.mu1_tilde[p] += G(q, p) * difference_at(state.u1, q, ell);
    }
  }
  return m;
}

BoundedFluxes bounded_fluxes(const State& state, const BoundedParams& params, const BoundedGrid1D& grid) {
  const BoundedMu m = bounded_mu(state, params, grid);
  const int ell = grid.n_cells();
  const double dx = grid.dx();
  BoundedFluxes f{std::vector<double>(static_cast<std::size_t>(ell + 1), 0.0),
                  std::vector<double>(static_cast<std::size_t>(ell + 1), 0.0)};
  for (int p = 1; p < ell; ++p) {
    const double d1 = difference_at(state.u1, p, ell);
    const double d2 = difference_at(state.u2, p, ell);
    f.f1[p] = params.d1 * d1 / dx + params.d12 * m.mu2[p] * d1 / dx +
              params.d12 * average_at(state.u1, p, ell) * m.mu2_tilde[p];
    f.f2[p] = params.d2 * d2 / dx + params.d21 * m.mu1[p] * d2 / dx +
              params.d21 * average_at(state.u2, p, ell) * m.mu1_tilde[p];
  }
  return f;
}

std::pair<CellField, CellField> bounded_residual(const State& candidate, const State& previous, double dt,
                                                 const BoundedParams& params, const BoundedGrid1D& grid) {
  require_state(previous, grid);
  const BoundedFluxes f = bounded_fluxes(candidate, params, grid);
  const int ell = grid.n_cells();
  const double dx = grid.dx();
  CellField r1(static_cast<std::size_t>(ell)), r2(static_cast<std::size_t>(ell));
  for (int i = 0; i < ell; ++i) {
    r1[i] = (candidate.u1[i] - previous.u1[i]) / dt + (f.f1[i + 1] - f.f1[i]) / dx;
    r2[i] = (candidate.u2[i] - previous.u2[i]) / dt + (f.f2[i + 1] - f.f2[i]) / dx;
  }
  return {r1, r2};
}

BoundedStepProblem::BoundedStepProblem(const BoundedParams& params, const BoundedGrid1D& grid,
                                       std::span<const double> previous, double dt)
    : params_(params), grid_(grid), g_(params.kernel.sample(grid)), prev_(previous.begin(), previous.end()), dt_(dt) {
  params_.validate();
  if (prev_.size() != 2 * static_cast<std::size_t>(grid.n_cells())) throw ConfigError("previous state size mismatch");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
}

// Fluxes bilinear in (a, b): the gradient factor comes from a, the G-weighted
// mobility from b; with_linear adds the linear diffusion of a.
void BoundedStepProblem::flux_parts(std::span<const double> a, std::span<const double> b, bool with_linear,
                                    std::span<double> f) const {
  const int ell = grid_.n_cells();
  const auto n = static_cast<std::size_t>(ell);
  const double dx = grid_.dx();
  auto a1 = a.subspan(0, n), a2 = a.subspan(n, n);
  auto b1 = b.subspan(0, n), b2 = b.subspan(n, n);
  std::vector<double> avg1(n + 1), avg2(n + 1), dif1(n + 1), dif2(n + 1);
  for (int q = 0; q <= ell; ++q) {
    avg1[q] = average_at(b1, q, ell);
    avg2[q] = average_at(b2, q, ell);
    dif1[q] = difference_at(b1, q, ell);
    dif2[q] = difference_at(b2, q, ell);
  }
  std::fill(f.begin(), f.end(), 0.0);
  for (int p = 1; p < ell; ++p) {
    double mu2 = 0.0, mu2t = 0.0, mu1 = 0.0, mu1t = 0.0;
    for (int q = 0; q <= ell; ++q) {
      mu2 += dx * g_(p, q) * avg2[q];
      mu2t += g_(p, q) * dif2[q];
      mu1 += dx * g_(q, p) * avg1[q];
      mu1t += g_(q, p) * dif1[q];
    }
    const double da1 = difference_at(a1, p, ell);
    const double da2 = difference_at(a2, p, ell);
    double f1 = params_.d12 * (mu2 * da1 / dx + average_at(a1, p, ell) * mu2t);
    double f2 = params_.d21 * (mu1 * da2 / dx + average_at(a2, p, ell) * mu1t);
    if (with_linear) {
      f1 += params_.d1 * da1 / dx;
      f2 += params_.d2 * da2 / dx;
    }
    f[p] = f1;
    f[n + 1 + p] = f2;
  }
}

void BoundedStepProblem::residual(std::span<const double> u, std::span<double> r) const {
  const int ell = grid_.n_cells();
  const auto n = static_cast<std::size_t>(ell);
  const double dx = grid_.dx();
  std::vector<double> f(2 * (n + 1));
  flux_parts(u, u, true, f);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = (u[i] - prev_[i]) / dt_ + (f[i + 1] - f[i]) / dx;
    r[n + i] = (u[n + i] - prev_[n + i]) / dt_ + (f[n + 1 + i + 1] - f[n + 1 + i]) / dx;
  }
}

double BoundedStepProblem::residual_floor(std::span<const double> u) const {
  double umax = 0.0, pmax = 0.0;
  for (double v : u) umax = std::max(umax, std::abs(v));
  for (double v : prev_) pmax = std::max(pmax, std::abs(v));
  const double dx = grid_.dx();
  const double gmax = g_.cwiseAbs().maxCoeff();
  const double mob = std::max(params_.d1, params_.d2) + std::max(params_.d12, params_.d21) * gmax * umax;
  return 64.0 * std::numeric_limits<double>::epsilon() * ((umax + pmax) / dt_ + 4.0 * mob * umax / (dx * dx));
}

void BoundedStepProblem::apply_jacobian(std::span<const double> v, std::span<double> out) const {
  const int ell = grid_.n_cells();
  const auto n = static_cast<std::size_t>(ell);
  const double dx = grid_.dx();
  std::vector<double> fa(2 * (n + 1)), fb(2 * (n + 1));
  flux_parts(v, point_, true, fa);
  flux_parts(point_, v, false, fb);
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] += fb[i];
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = v[i] / dt_ + (fa[i + 1] - fa[i]) / dx;
    out[n + i] = v[n + i] / dt_ + (fa[n + 1 + i + 1] - fa[n + 1 + i]) / dx;
  }
}

StepOutcome bounded_step(const State& previous, double dt, const BoundedParams& params, const BoundedGrid1D& grid,
                         const SolverConfig& config) {
  require_state(previous, grid);
  for (const CellField* f : {&previous.u1, &previous.u2}) {
    for (double v : *f) {
      if (!(v >= 0.0)) throw DomainError("previous state must be non-negative");
    }
  }
  const std::vector<double> prev = pack(previous);
  BoundedStepProblem problem(params, grid, prev, dt);
  SolverConfig cfg = config;
  if (cfg.linear_solver == LinearSolverKind::Auto) cfg.linear_solver = LinearSolverKind::DenseDirect;
  const NewtonResult nr = solve_implicit(problem, first_guess(previous), cfg);
  StepOutcome out;
  out.state = unpack(nr.u, previous.time + dt);
  out.iterations = nr.iterations;
  out.initial_residual = nr.initial_residual;
  out.final_residual = nr.final_residual;
  out.dt_used = dt;
  out.dt_next = dt;
  out.converged = nr.converged;
  out.message = nr.message;
  return out;
}

double bounded_entropy(const State& state, const BoundedParams& params, const BoundedGrid1D& grid) {
  require_state(state, grid);
  double s = 0.0;
  for (double v : state.u1) s += entropy_density(v, params.d12);
  for (double v : state.u2) s += entropy_density(v, params.d21);
  return grid.dx() * s;
}

std::vector<BoundedEntropyRow> bounded_entropy_check(std::span<const State> trajectory, const BoundedParams& params,
                                                     const BoundedGrid1D& grid, double dt,
                                                     std::span<const double> residuals) {
  params.validate();
  if (trajectory.size() < 2) return {};
  if (residuals.size() + 1 != trajectory.size()) throw ConfigError("one residual per step is required");
  const double dx = grid.dx();
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<BoundedEntropyRow> rows;
  double h_prev = bounded_entropy(trajectory[0], params, grid);
  for (std::size_t k = 1; k < trajectory.size(); ++k) {
    const State& s = trajectory[k];
    const double h = bounded_entropy(s, params, grid);
    auto root_term = [&](const CellField& u) {
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double d = std::sqrt(u[i]) - std::sqrt(u[i + 1]);
        acc += d * d;
      }
      return acc / dx;
    };
    double log_max = 0.0;
    for (const CellField* f : {&s.u1, &s.u2}) {
      for (double v : *f) log_max = std::max(log_max, std::abs(std::log(v)));
    }
    BoundedEntropyRow row;
    row.k = static_cast<int>(k);
    row.lhs = (h - h_prev) / dt + 4.0 * params.d1 / params.d12 * root_term(s.u1) +
              4.0 * params.d2 / params.d21 * root_term(s.u2);
    // linearized residual contribution plus rounding of the entropy sums
    row.tolerance = 10.0 * residuals[k - 1] * (1.0 + log_max) / std::min(params.d12, params.d21) +
                    1e3 * eps * (std::abs(h) + std::abs(h_prev) + 1.0) / dt;
    row.pass = row.lhs <= row.tolerance;
    rows.push_back(row);
    h_prev = h;
  }
  return rows;
}

double log_mean(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("logarithmic mean needs positive arguments");
  if (a == b) return a;
  const double la = std::log(a), lb = std::log(b);
  if (la == lb) return a;
  return (a - b) / (la - lb);
}

std::array<double, 4> entropy_coupling_matrix(double u1a, double u1b, double u2a, double u2b) {
  const double h1 = 0.5 * (u1a + u1b);
  const double h2 = 0.5 * (u2a + u2b);
  const double l1 = log_mean(u1a, u1b);
  const double l2 = log_mean(u2a, u2b);
  return {h2 / l1, h1 / l1, h2 / l2, h1 / l2};
}

}  // namespace nlskt
