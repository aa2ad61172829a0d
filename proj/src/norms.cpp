#include "nlskt/norms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlskt/errors.hpp"

namespace nlskt {

namespace {

void require_size(std::span<const double> u, const PeriodicGrid& grid) {
  if (u.size() != grid.size()) throw ConfigError("field size does not match the grid");
}

void require_p(double p) {
  if (!(p >= 1.0)) throw ConfigError("norm exponent must be >= 1");
}

void require_nonnegative_field(std::span<const double> u, const char* what) {
  for (double v : u) {
    if (!(v >= 0.0)) throw DomainError(std::string(what) + " requires non-negative densities");
  }
}

// sum_m w_m sum_i sum_axes (V/h_a)^2 (sqrt(a_{i+e} b_{i+e-m}) - sqrt(a_i b_{i-m}))^2
double pair_term(const std::vector<double>& sa, const std::vector<double>& sb, const DiscreteKernel& k,
                 const PeriodicGrid& g) {
  const double vol = g.cell_volume();
  const int nx = g.nx();
  const int ny = g.ny();
  double total = 0.0;
  std::vector<double> prod(g.size());
  for (int l = 0; l < ny; ++l) {
    for (int m = 0; m < nx; ++m) {
      const double w = k.value(m, l);
      if (w == 0.0) continue;
      for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) prod[g.index(i, j)] = sa[g.index(i, j)] * sb[g.index(i - m, j - l)];
      }
      double s = 0.0;
      for (int axis = 0; axis < g.dimension(); ++axis) {
        const double h = axis == 0 ? g.dx() : g.dy();
        const double c = (vol / h) * (vol / h);
        double sa_axis = 0.0;
        for (std::size_t cell = 0; cell < prod.size(); ++cell) {
          const double d = prod[g.neighbor(cell, axis, 1)] - prod[cell];
          sa_axis += d * d;
        }
        s += c * sa_axis;
      }
      total += w * s;
    }
  }
  return total;
}

}  // namespace

double lp_norm(std::span<const double> u, const PeriodicGrid& grid, double p) {
  require_size(u, grid);
  require_p(p);
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : u) s += std::pow(std::abs(v), p);
  return std::pow(grid.cell_volume() * s, 1.0 / p);
}

double w1p_seminorm(std::span<const double> u, const PeriodicGrid& grid, double p) {
  require_size(u, grid);
  require_p(p);
  if (std::isinf(p)) throw ConfigError("W1p seminorm needs finite p");
  double s = 0.0;
  for (std::size_t cell = 0; cell < u.size(); ++cell) {
    for (int axis = 0; axis < grid.dimension(); ++axis) {
      const double h = axis == 0 ? grid.dx() : grid.dy();
      s += std::pow(std::abs((u[grid.neighbor(cell, axis, 1)] - u[cell]) / h), p);
    }
  }
  return std::pow(grid.cell_volume() * s, 1.0 / p);
}

double bv_norm(std::span<const double> u, const PeriodicGrid& grid) {
  return w1p_seminorm(u, grid, 1.0) + lp_norm(u, grid, 1.0);
}

double evaluate_norm(const NormKind& kind, std::span<const double> u, const PeriodicGrid& grid) {
  switch (kind.tag) {
    case NormKind::Tag::Lp:
      return lp_norm(u, grid, kind.p);
    case NormKind::Tag::W1pSeminorm:
      return w1p_seminorm(u, grid, kind.p);
    case NormKind::Tag::BV:
      return bv_norm(u, grid);
  }
  return 0.0;
}

double l2_space_time(std::span<const CellField> trajectory, const PeriodicGrid& grid, double dt) {
  double s = 0.0;
  for (const CellField& u : trajectory) {
    const double n = lp_norm(u, grid, 2.0);
    s += dt * n * n;
  }
  return std::sqrt(s);
}

double entropy_density(double x, double d) {
  if (!(d > 0.0)) throw DomainError("entropy needs positive cross-diffusion coefficients");
  if (!(x >= 0.0)) throw DomainError("entropy of a negative density");
  if (x == 0.0) return 1.0 / d;
  return (x * (std::log(x) - 1.0) + 1.0) / d;
}

double entropy(std::span<const double> u1, std::span<const double> u2, const PeriodicGrid& grid, double d12,
               double d21) {
  require_size(u1, grid);
  require_size(u2, grid);
  double s = 0.0;
  for (double v : u1) s += entropy_density(v, d12);
  for (double v : u2) s += entropy_density(v, d21);
  return grid.cell_volume() * s;
}

double dissipation(std::span<const double> u1, std::span<const double> u2, const SchemeParams& params) {
  const PeriodicGrid& g = params.grid();
  require_size(u1, g);
  require_size(u2, g);
  require_nonnegative_field(u1, "dissipation");
  require_nonnegative_field(u2, "dissipation");
  const auto& c = params.coeffs;
  if (!(c.d12 > 0.0) || !(c.d21 > 0.0)) throw DomainError("dissipation needs d12, d21 > 0");
  std::vector<double> s1(u1.size()), s2(u2.size());
  for (std::size_t i = 0; i < u1.size(); ++i) {
    s1[i] = std::sqrt(u1[i]);
    s2[i] = std::sqrt(u2[i]);
  }
  double d = 0.0;
  if (c.d11 > 0.0) d += 2.0 * c.d11 / c.d12 * pair_term(s1, s1, params.sigma1, g);
  if (c.d22 > 0.0) d += 2.0 * c.d22 / c.d21 * pair_term(s2, s2, params.sigma2, g);
  if (c.d1 > 0.0) {
    const double w = w1p_seminorm(s1, g, 2.0);
    d += 4.0 * c.d1 / c.d12 * w * w;
  }
  if (c.d2 > 0.0) {
    const double w = w1p_seminorm(s2, g, 2.0);
    d += 4.0 * c.d2 / c.d21 * w * w;
  }
  d += 4.0 * pair_term(s1, s2, params.rho1, g);
  return d;
}

double wasserstein1(std::span<const double> f, std::span<const double> g, const PeriodicGrid& grid) {
  if (grid.dimension() != 1) throw ConfigError("wasserstein1 is one-dimensional");
  require_size(f, grid);
  require_size(g, grid);
  const double dx = grid.dx();
  double mf = 0.0, mg = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] >= 0.0) || !(g[i] >= 0.0)) throw InvalidInput("wasserstein1 needs non-negative densities");
    mf += dx * f[i];
    mg += dx * g[i];
  }
  if (std::abs(mf - mg) > 1e-10 * std::max(mf, mg)) throw InvalidInput("wasserstein1 needs equal masses");
  // F - G is linear on each cell; integrate |.| exactly
  double a = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double b = a + dx * (f[i] - g[i]);
    if ((a >= 0.0 && b >= 0.0) || (a <= 0.0 && b <= 0.0)) {
      total += 0.5 * dx * (std::abs(a) + std::abs(b));
    } else {
      total += 0.5 * dx * (a * a + b * b) / (std::abs(a) + std::abs(b));
    }
    a = b;
  }
  return total;
}

}  // namespace nlskt
