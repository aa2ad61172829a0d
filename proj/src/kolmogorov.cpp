#include "nlskt/kolmogorov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlskt/errors.hpp"
#include "nlskt/norms.hpp"
#include "nlskt/skt_core.hpp"

namespace nlskt {

namespace {

double l2_sq(std::span<const double> z, double dx) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return dx * s;
}

double max_positive_laplacian(const KolmogorovProblem& p) {
  double m = 0.0;
  for (const CellField& mu : p.mu) m = std::max(m, laplacian_positive_part(mu, p.grid));
  return m;
}

}  // namespace

void KolmogorovProblem::validate() const {
  if (grid.dimension() != 1) throw ConfigError("Kolmogorov problems are one-dimensional");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (z0.size() != grid.size()) throw ConfigError("initial datum does not match the grid");
  for (const CellField& m : mu) {
    if (m.size() != grid.size()) throw ConfigError("mobility does not match the grid");
    for (double v : m) {
      if (!(v >= 0.0)) throw ConfigError("mobility must be non-negative");
    }
  }
}

PeriodicTridiagonal assemble_m_matrix(std::span<const double> mu, double dt, const PeriodicGrid& grid) {
  const std::size_t n = grid.size();
  if (mu.size() != n) throw ConfigError("mobility does not match the grid");
  const double c = dt / (grid.dx() * grid.dx());
  PeriodicTridiagonal m{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mu[i] >= 0.0)) throw ConfigError("mobility must be non-negative");
    m.diag[i] = 1.0 + 2.0 * c * mu[i];
    m.lower[i] = -c * mu[(i + n - 1) % n];
    m.upper[i] = -c * mu[(i + 1) % n];
  }
  return m;
}

CellField forward_step(std::span<const double> z_prev, std::span<const double> mu_k, double dt,
                       const PeriodicGrid& grid) {
  if (z_prev.size() != grid.size()) throw ConfigError("state does not match the grid");
  return solve_periodic_tridiagonal(assemble_m_matrix(mu_k, dt, grid), z_prev);
}

std::vector<CellField> solve_forward(const KolmogorovProblem& p) {
  p.validate();
  std::vector<CellField> z{p.z0};
  z.reserve(p.n_steps() + 1);
  for (const CellField& mu : p.mu) z.push_back(forward_step(z.back(), mu, p.dt, p.grid));
  return z;
}

double laplacian_positive_part(std::span<const double> mu, const PeriodicGrid& grid) {
  const CellField lap = discrete_laplacian(mu, grid);
  double m = 0.0;
  for (double v : lap) m = std::max(m, v);
  return m;
}

double laplacian_negative_part(std::span<const double> mu, const PeriodicGrid& grid) {
  const CellField lap = discrete_laplacian(mu, grid);
  double m = 0.0;
  for (double v : lap) m = std::max(m, -v);
  return m;
}

LinfBoundsReport linf_bounds_check(const KolmogorovProblem& p, double gamma, double Gamma) {
  p.validate();
  LinfBoundsReport rep;
  const double lam = max_positive_laplacian(p);
  rep.dt_limit = lam > 0.0 ? 1.0 / lam : std::numeric_limits<double>::infinity();
  rep.applicable = p.dt < rep.dt_limit;
  const std::vector<CellField> z = solve_forward(p);
  double lo = gamma;
  double hi = Gamma;
  rep.all_pass = rep.applicable;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (k > 0) {
      lo /= 1.0 + p.dt * laplacian_negative_part(p.mu[k - 1], p.grid);
      hi /= 1.0 - p.dt * laplacian_positive_part(p.mu[k - 1], p.grid);
    }
    const auto [mn, mx] = std::minmax_element(z[k].begin(), z[k].end());
    // one-ulp-scale slack for the linear solve
    const double slack = 1e-12 * std::max(std::abs(hi), 1.0);
    const bool ok = *mn >= lo - slack && *mx <= hi + slack;
    rep.lower.push_back(lo);
    rep.upper.push_back(hi);
    rep.min_z.push_back(*mn);
    rep.max_z.push_back(*mx);
    rep.pass.push_back(ok);
    rep.all_pass = rep.all_pass && ok;
  }
  return rep;
}

EnergyReport energy_estimate_check(const KolmogorovProblem& p) {
  p.validate();
  EnergyReport rep;
  const double lam = max_positive_laplacian(p);
  rep.applicable = p.dt * lam < 1.0;
  const std::vector<CellField> z = solve_forward(p);
  const double dx = p.grid.dx();
  const std::size_t n = p.grid.size();
  const double z0 = l2_sq(p.z0, dx);
  double dissip = 0.0;
  double growth = 1.0;
  rep.all_pass = rep.applicable;
  for (std::size_t k = 1; k < z.size(); ++k) {
    const CellField& mu = p.mu[k - 1];
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const double d = z[k][j] - z[k][i];
      s += (mu[i] + mu[j]) * d * d / dx;
    }
    dissip += p.dt * s;
    growth /= 1.0 - p.dt * laplacian_positive_part(mu, p.grid);
    const double lhs = l2_sq(z[k], dx) + dissip;
    const double rhs = growth * z0;
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.all_pass = rep.all_pass && lhs <= rhs * (1.0 + 1e-12) + 1e-300;
  }
  return rep;
}

std::vector<CellField> dual_solve(const KolmogorovProblem& p, const DualProblem& dual) {
  p.validate();
  const std::size_t steps = p.n_steps();
  if (dual.sources.size() != steps) throw ConfigError("dual sources must match the number of steps");
  const std::size_t n = p.grid.size();
  std::vector<CellField> v(steps);
  CellField next(n, 0.0);
  for (std::size_t k = steps; k-- > 0;) {
    if (dual.sources[k].size() != n) throw ConfigError("dual source does not match the grid");
    CellField rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = next[i] + p.dt * dual.sources[k][i];
    const PeriodicTridiagonal mt = assemble_m_matrix(p.mu[k], p.dt, p.grid).transposed();
    v[k] = solve_periodic_tridiagonal(mt, rhs);
    next = v[k];
  }
  return v;
}

DualEstimateReport dual_estimate_check(const KolmogorovProblem& p, const DualProblem& dual) {
  const std::vector<CellField> v = dual_solve(p, dual);
  const std::size_t steps = p.n_steps();
  const std::size_t n = p.grid.size();
  const double dx = p.grid.dx();
  DualEstimateReport rep;
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(p.mu[k][i] > 0.0)) throw PreconditionError("dual estimate needs strictly positive mobility");
      rep.rhs += p.dt * dx * dual.sources[k][i] * dual.sources[k][i] / p.mu[k][i];
    }
  }
  std::vector<double> tail(steps + 1, 0.0), tail_literal(steps + 1, 0.0);
  for (std::size_t k = steps; k-- > 0;) {
    const CellField lap = discrete_laplacian(v[k], p.grid);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p.mu[k][i] * lap[i] * lap[i];
    tail[k] = tail[k + 1] + p.dt * dx * s;
    tail_literal[k] = tail_literal[k + 1] + p.dt * s / dx;
  }
  rep.all_pass = true;
  for (std::size_t k = 0; k < steps; ++k) {
    const double semi = w1p_seminorm(v[k], p.grid, 2.0);
    rep.lhs.push_back(semi * semi + tail[k]);
    rep.lhs_literal.push_back(semi * semi + tail_literal[k]);
    rep.all_pass = rep.all_pass && rep.lhs.back() <= rep.rhs * (1.0 + 1e-12);
  }
  return rep;
}

DualityReport duality_inequality_check(const KolmogorovProblem& p) {
  p.validate();
  const std::vector<CellField> z = solve_forward(p);
  const double dx = p.grid.dx();
  DualityReport rep;
  double acc = 0.0;
  for (std::size_t k = 1; k < z.size(); ++k) {
    const CellField& mu = p.mu[k - 1];
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (!(mu[i] > 0.0)) throw PreconditionError("duality check needs strictly positive mobility");
      acc += p.dt * dx * mu[i] * z[k][i] * z[k][i];
      rep.mu_l1 += p.dt * dx * mu[i];
    }
  }
  rep.lhs = std::sqrt(acc);
  rep.normalization = (1.0 + std::sqrt(rep.mu_l1)) * std::sqrt(l2_sq(p.z0, dx));
  rep.ratio = rep.normalization > 0.0 ? rep.lhs / rep.normalization : 0.0;
  return rep;
}

std::vector<double> discrete_gronwall(double u0, std::span<const double> a, double dt) {
  if (!(u0 >= 0.0)) throw PreconditionError("Gronwall needs u0 >= 0");
  if (!(dt > 0.0)) throw PreconditionError("Gronwall needs dt > 0");
  std::vector<double> out{u0};
  double b = u0;
  for (double ak : a) {
    if (!(ak >= 0.0)) throw PreconditionError("Gronwall needs a_k >= 0");
    if (!(dt * ak < 1.0)) throw PreconditionError("Gronwall needs dt < 1 / sup a_k");
    b /= 1.0 - dt * ak;
    out.push_back(b);
  }
  return out;
}

}  // namespace nlskt
