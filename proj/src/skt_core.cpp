#include "nlskt/skt_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlskt/errors.hpp"
#include "nlskt/norms.hpp"

namespace nlskt {

namespace {

void require_state(const State& s, const PeriodicGrid& g) {
  if (s.u1.size() != g.size() || s.u2.size() != g.size()) throw ConfigError("state does not match the grid");
}

int representative(int m, int n) { return m <= n / 2 ? m : m - n; }

Fluxes make_fluxes(const PeriodicGrid& g) {
  Fluxes f;
  f.f1.assign(static_cast<std::size_t>(g.dimension()), CellField(g.size(), 0.0));
  f.f2.assign(static_cast<std::size_t>(g.dimension()), CellField(g.size(), 0.0));
  return f;
}

}  // namespace

MuFields mu(const State& state, const SchemeParams& params) {
  require_state(state, params.grid());
  SktSystem sys(params);
  MuFields m{CellField(state.u1.size()), CellField(state.u1.size())};
  sys.compute_mu(state.u1, state.u2, m.mu1, m.mu2);
  return m;
}

void discrete_laplacian(std::span<const double> w, const PeriodicGrid& g, std::span<double> out) {
  const int nx = g.nx();
  const int ny = g.ny();
  const double cx = 1.0 / (g.dx() * g.dx());
  for (int j = 0; j < ny; ++j) {
    const double* row = w.data() + static_cast<std::size_t>(j) * nx;
    double* o = out.data() + static_cast<std::size_t>(j) * nx;
    o[0] = cx * (row[1] - 2.0 * row[0] + row[nx - 1]);
    for (int i = 1; i < nx - 1; ++i) o[i] = cx * (row[i + 1] - 2.0 * row[i] + row[i - 1]);
    o[nx - 1] = cx * (row[0] - 2.0 * row[nx - 1] + row[nx - 2]);
  }
  if (g.dimension() == 2) {
    const double cy = 1.0 / (g.dy() * g.dy());
    for (int j = 0; j < ny; ++j) {
      const double* up = w.data() + static_cast<std::size_t>((j + 1) % ny) * nx;
      const double* mid = w.data() + static_cast<std::size_t>(j) * nx;
      const double* dn = w.data() + static_cast<std::size_t>((j - 1 + ny) % ny) * nx;
      double* o = out.data() + static_cast<std::size_t>(j) * nx;
      for (int i = 0; i < nx; ++i) o[i] += cy * (up[i] - 2.0 * mid[i] + dn[i]);
    }
  }
}

CellField discrete_laplacian(std::span<const double> w, const PeriodicGrid& grid) {
  if (w.size() != grid.size()) throw ConfigError("field size does not match the grid");
  CellField out(w.size());
  discrete_laplacian(w, grid, out);
  return out;
}

Fluxes fluxes(const State& state, const SchemeParams& params) {
  const PeriodicGrid& g = params.grid();
  require_state(state, g);
  const MuFields m = mu(state, params);
  Fluxes f = make_fluxes(g);
  for (int axis = 0; axis < g.dimension(); ++axis) {
    const double h = axis == 0 ? g.dx() : g.dy();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::size_t n = g.neighbor(i, axis, 1);
      f.f1[axis][i] = (state.u1[i] * m.mu1[i] - state.u1[n] * m.mu1[n]) / h;
      f.f2[axis][i] = (state.u2[i] * m.mu2[i] - state.u2[n] * m.mu2[n]) / h;
    }
  }
  return f;
}

Fluxes centered_fluxes(const State& state, const SchemeParams& params) {
  const PeriodicGrid& g = params.grid();
  require_state(state, g);
  const MuFields m = mu(state, params);
  Fluxes f = make_fluxes(g);
  auto face = [](double ua, double ub, double ma, double mb, double h) {
    return 0.5 * (ma + mb) * (ua - ub) / h + 0.5 * (ua + ub) * (ma - mb) / h;
  };
  for (int axis = 0; axis < g.dimension(); ++axis) {
    const double h = axis == 0 ? g.dx() : g.dy();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::size_t n = g.neighbor(i, axis, 1);
      f.f1[axis][i] = face(state.u1[i], state.u1[n], m.mu1[i], m.mu1[n], h);
      f.f2[axis][i] = face(state.u2[i], state.u2[n], m.mu2[i], m.mu2[n], h);
    }
  }
  return f;
}

std::pair<CellField, CellField> reaction(const State& state, const ReactionSpec& spec) {
  if (state.u1.size() != state.u2.size()) throw ConfigError("species fields differ in size");
  CellField r1(state.u1.size()), r2(state.u2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    const ReactionPoint p = evaluate_reaction(spec, state.u1[i], state.u2[i]);
    r1[i] = p.r1;
    r2[i] = p.r2;
  }
  return {r1, r2};
}

std::pair<CellField, CellField> step_residual(const State& candidate, const State& previous, double dt,
                                              const SchemeParams& params) {
  const PeriodicGrid& g = params.grid();
  require_state(candidate, g);
  require_state(previous, g);
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  SktSystem sys(params);
  const std::vector<double> u = pack(candidate);
  const std::vector<double> up = pack(previous);
  std::vector<double> r(u.size());
  sys.residual(up, dt, u, r);
  const std::size_t n = g.size();
  return {CellField(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(n)),
          CellField(r.begin() + static_cast<std::ptrdiff_t>(n), r.end())};
}

MaxPrincipleBounds max_principle_bounds(const SchemeParams& params, double mass1, double mass2, double gamma,
                                        double Gamma, double dt, int k) {
  if (k < 0) throw ConfigError("step index must be non-negative");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const auto& c = params.coeffs;
  const PeriodicGrid& g = params.grid();
  auto lap_norm = [&](const DiscreteKernel& kern) {
    if (!kern.source()) throw PreconditionError("kernel Laplacian needs the continuous kernel");
    return kernel_laplacian_sup(*kern.source(), g);
  };
  const double s1 = c.d11 > 0.0 ? c.d11 * mass1 * lap_norm(params.sigma1) : 0.0;
  const double s2 = c.d22 > 0.0 ? c.d22 * mass2 * lap_norm(params.sigma2) : 0.0;
  const double cross = std::min(c.d12 * mass2, c.d21 * mass1);
  const double r = cross > 0.0 ? cross * lap_norm(params.rho1) : 0.0;
  MaxPrincipleBounds b;
  b.rate = std::min(s1, s2) + r;
  b.dt_limit = b.rate > 0.0 ? 1.0 / b.rate : std::numeric_limits<double>::infinity();
  b.applicable = dt < b.dt_limit;
  b.lower = gamma * std::pow(1.0 + dt * b.rate, -static_cast<double>(k));
  b.upper = b.applicable ? Gamma * std::pow(1.0 - dt * b.rate, -static_cast<double>(k))
                         : std::numeric_limits<double>::infinity();
  return b;
}

double duality_functional(std::span<const State> trajectory, const SchemeParams& params, double dt) {
  const PeriodicGrid& g = params.grid();
  SktSystem sys(params);
  CellField m1(g.size()), m2(g.size());
  double total = 0.0;
  for (const State& s : trajectory) {
    require_state(s, g);
    sys.compute_mu(s.u1, s.u2, m1, m2);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      acc += (m1[i] * s.u1[i] + m2[i] * s.u2[i]) * (s.u1[i] + s.u2[i]);
    }
    total += dt * g.cell_volume() * acc;
  }
  return total;
}

double duality_normalizer(const State& initial, const SchemeParams& params, double t_final) {
  const PeriodicGrid& g = params.grid();
  require_state(initial, g);
  const auto& c = params.coeffs;
  const double m1 = lp_norm(initial.u1, g, 1.0);
  const double m2 = lp_norm(initial.u2, g, 1.0);
  const double a = c.d1 + c.d2 + c.d11 * m1 * params.sigma1.total_weight() +
                   c.d22 * m2 * params.sigma2.total_weight() +
                   params.rho1.total_weight() * (c.d12 * m2 + c.d21 * m1);
  const double n1 = lp_norm(initial.u1, g, 2.0);
  const double n2 = lp_norm(initial.u2, g, 2.0);
  return (1.0 + t_final * a) * (n1 * n1 + n2 * n2);
}

std::vector<double> pack(const State& s) {
  std::vector<double> x;
  x.reserve(s.u1.size() + s.u2.size());
  x.insert(x.end(), s.u1.begin(), s.u1.end());
  x.insert(x.end(), s.u2.begin(), s.u2.end());
  return x;
}

State unpack(std::span<const double> x, double time) {
  const std::size_t n = x.size() / 2;
  return State{CellField(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)),
               CellField(x.begin() + static_cast<std::ptrdiff_t>(n), x.end()), time};
}

SktSystem::SktSystem(SchemeParams params) : params_(std::move(params)) {
  const auto& c = params_.coeffs;
  if (c.d11 != 0.0) couplings_.push_back({0, c.d11, 0, 0});
  if (c.d12 != 0.0) couplings_.push_back({2, c.d12, 0, 1});
  if (c.d21 != 0.0) couplings_.push_back({3, c.d21, 1, 0});
  if (c.d22 != 0.0) couplings_.push_back({1, c.d22, 1, 1});
}

const DiscreteKernel& SktSystem::kernel(int id) const {
  switch (id) {
    case 0:
      return params_.sigma1;
    case 1:
      return params_.sigma2;
    case 2:
      return params_.rho1;
    default:
      return params_.rho2;
  }
}

void SktSystem::compute_mu(std::span<const double> u1, std::span<const double> u2, std::span<double> mu1,
                           std::span<double> mu2) const {
  std::fill(mu1.begin(), mu1.end(), params_.coeffs.d1);
  std::fill(mu2.begin(), mu2.end(), params_.coeffs.d2);
  CellField tmp(u1.size());
  for (const Coupling& cp : couplings_) {
    kernel(cp.kernel).convolve(cp.source == 0 ? u1 : u2, tmp);
    std::span<double> target = cp.target == 0 ? mu1 : mu2;
    for (std::size_t i = 0; i < tmp.size(); ++i) target[i] += cp.coeff * tmp[i];
  }
}

void SktSystem::residual(std::span<const double> u_prev, double dt, std::span<const double> u,
                         std::span<double> r) const {
  const std::size_t n = cells();
  auto u1 = u.subspan(0, n);
  auto u2 = u.subspan(n, n);
  CellField m1(n), m2(n), w(2 * n), lap(n);
  compute_mu(u1, u2, m1, m2);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = m1[i] * u1[i];
    w[n + i] = m2[i] * u2[i];
  }
  const bool react = !is_zero_reaction(params_.reaction);
  for (int s = 0; s < 2; ++s) {
    discrete_laplacian(std::span<const double>(w).subspan(s * n, n), grid(), lap);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = s * n + i;
      r[idx] = (u[idx] - u_prev[idx]) / dt - lap[i];
    }
  }
  if (react) {
    for (std::size_t i = 0; i < n; ++i) {
      const ReactionPoint p = evaluate_reaction(params_.reaction, u1[i], u2[i]);
      r[i] -= p.r1;
      r[n + i] -= p.r2;
    }
  }
}

double SktSystem::residual_scale(std::span<const double> u_prev, double dt, std::span<const double> u) const {
  const std::size_t n = cells();
  auto u1 = u.subspan(0, n);
  auto u2 = u.subspan(n, n);
  CellField m1(n), m2(n);
  compute_mu(u1, u2, m1, m2);
  const PeriodicGrid& g = grid();
  double lap_w = 2.0 / (g.dx() * g.dx());
  if (g.dimension() == 2) lap_w += 2.0 / (g.dy() * g.dy());
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w1 = std::abs(m1[i] * u1[i]);
    double w2 = std::abs(m2[i] * u2[i]);
    for (int axis = 0; axis < g.dimension(); ++axis) {
      for (int step : {-1, 1}) {
        const std::size_t j = g.neighbor(i, axis, step);
        w1 = std::max(w1, std::abs(m1[j] * u1[j]));
        w2 = std::max(w2, std::abs(m2[j] * u2[j]));
      }
    }
    double s1 = (std::abs(u1[i]) + std::abs(u_prev[i])) / dt + 2.0 * lap_w * w1;
    double s2 = (std::abs(u2[i]) + std::abs(u_prev[n + i])) / dt + 2.0 * lap_w * w2;
    const ReactionPoint p = evaluate_reaction(params_.reaction, u1[i], u2[i]);
    s1 += std::abs(p.r1) + std::abs(p.d1_du1 * u1[i]) + std::abs(p.d1_du2 * u2[i]);
    s2 += std::abs(p.r2) + std::abs(p.d2_du1 * u1[i]) + std::abs(p.d2_du2 * u2[i]);
    scale = std::max({scale, s1, s2});
  }
  return scale;
}

SktSystem::Linearization SktSystem::linearize(std::span<const double> u) const {
  const std::size_t n = cells();
  Linearization lin;
  lin.u.assign(u.begin(), u.end());
  lin.mu1.resize(n);
  lin.mu2.resize(n);
  compute_mu(u.subspan(0, n), u.subspan(n, n), lin.mu1, lin.mu2);
  lin.dr.resize(n);
  if (!is_zero_reaction(params_.reaction)) {
    for (std::size_t i = 0; i < n; ++i) lin.dr[i] = evaluate_reaction(params_.reaction, u[i], u[n + i]);
  }
  return lin;
}

void SktSystem::apply_jacobian(const Linearization& lin, double dt, std::span<const double> v,
                               std::span<double> out) const {
  const std::size_t n = cells();
  CellField w(2 * n), tmp(n), lap(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = lin.mu1[i] * v[i];
    w[n + i] = lin.mu2[i] * v[n + i];
  }
  for (const Coupling& cp : couplings_) {
    kernel(cp.kernel).convolve(v.subspan(cp.source * n, n), tmp);
    const std::size_t off = cp.target * n;
    for (std::size_t i = 0; i < n; ++i) w[off + i] += lin.u[off + i] * cp.coeff * tmp[i];
  }
  for (int s = 0; s < 2; ++s) {
    discrete_laplacian(std::span<const double>(w).subspan(s * n, n), grid(), lap);
    for (std::size_t i = 0; i < n; ++i) out[s * n + i] = v[s * n + i] / dt - lap[i];
  }
  if (!is_zero_reaction(params_.reaction)) {
    for (std::size_t i = 0; i < n; ++i) {
      const ReactionPoint& p = lin.dr[i];
      out[i] -= p.d1_du1 * v[i] + p.d1_du2 * v[n + i];
      out[n + i] -= p.d2_du1 * v[i] + p.d2_du2 * v[n + i];
    }
  }
}

namespace {

struct StencilEntry {
  std::size_t row;
  double weight;
};

// Rows i whose Laplacian uses cell k, with the weight of w_k in row i.
int laplacian_column(const PeriodicGrid& g, std::size_t k, StencilEntry* out) {
  const double cx = 1.0 / (g.dx() * g.dx());
  int count = 0;
  double self = -2.0 * cx;
  out[count++] = {g.neighbor(k, 0, 1), cx};
  out[count++] = {g.neighbor(k, 0, -1), cx};
  if (g.dimension() == 2) {
    const double cy = 1.0 / (g.dy() * g.dy());
    self -= 2.0 * cy;
    out[count++] = {g.neighbor(k, 1, 1), cy};
    out[count++] = {g.neighbor(k, 1, -1), cy};
  }
  out[count++] = {k, self};
  return count;
}

}  // namespace

Eigen::MatrixXd SktSystem::dense_jacobian(const Linearization& lin, double dt) const {
  const std::size_t n = cells();
  const PeriodicGrid& g = grid();
  const double vol = g.cell_volume();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * n));
  StencilEntry st[5];
  std::vector<double> row(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int cnt = laplacian_column(g, k, st);
    for (int s = 0; s < 2; ++s) {
      const double mu_k = s == 0 ? lin.mu1[k] : lin.mu2[k];
      for (int e = 0; e < cnt; ++e) J(s * n + st[e].row, s * n + k) -= st[e].weight * mu_k;
    }
    const int kx = static_cast<int>(k % static_cast<std::size_t>(g.nx()));
    const int ky = static_cast<int>(k / static_cast<std::size_t>(g.nx()));
    for (const Coupling& cp : couplings_) {
      const DiscreteKernel& K = kernel(cp.kernel);
      const double uk = lin.u[cp.target * n + k];
      if (uk == 0.0) continue;
      for (std::size_t c = 0; c < n; ++c) {
        const int cx = static_cast<int>(c % static_cast<std::size_t>(g.nx()));
        const int cy = static_cast<int>(c / static_cast<std::size_t>(g.nx()));
        row[c] = uk * cp.coeff * vol * K.value(kx - cx, ky - cy);
      }
      for (int e = 0; e < cnt; ++e) {
        const std::size_t r = cp.target * n + st[e].row;
        for (std::size_t c = 0; c < n; ++c) J(r, cp.source * n + c) -= st[e].weight * row[c];
      }
    }
  }
  for (std::size_t i = 0; i < 2 * n; ++i) J(i, i) += 1.0 / dt;
  if (!is_zero_reaction(params_.reaction)) {
    for (std::size_t i = 0; i < n; ++i) {
      const ReactionPoint& p = lin.dr[i];
      J(i, i) -= p.d1_du1;
      J(i, n + i) -= p.d1_du2;
      J(n + i, i) -= p.d2_du1;
      J(n + i, n + i) -= p.d2_du2;
    }
  }
  return J;
}

Eigen::SparseMatrix<double> SktSystem::sparse_jacobian(const Linearization& lin, double dt, int radius) const {
  const std::size_t n = cells();
  const PeriodicGrid& g = grid();
  const double vol = g.cell_volume();
  struct Tap {
    int mx, my;
    double value;
  };
  std::vector<std::vector<Tap>> taps(couplings_.size());
  for (std::size_t c = 0; c < couplings_.size(); ++c) {
    const DiscreteKernel& K = kernel(couplings_[c].kernel);
    for (int l = 0; l < g.ny(); ++l) {
      for (int m = 0; m < g.nx(); ++m) {
        const double v = K.value(m, l);
        if (v == 0.0) continue;
        const int rm = representative(m, g.nx());
        const int rl = g.dimension() == 2 ? representative(l, g.ny()) : 0;
        if (radius >= 0 && (std::abs(rm) > radius || std::abs(rl) > radius)) continue;
        taps[c].push_back({m, l, v});
      }
    }
  }
  std::vector<Eigen::Triplet<double>> trip;
  std::size_t estimate = 2 * n * 6;
  for (const auto& t : taps) estimate += n * 5 * t.size();
  trip.reserve(estimate);
  StencilEntry st[5];
  for (std::size_t k = 0; k < n; ++k) {
    const int cnt = laplacian_column(g, k, st);
    for (int s = 0; s < 2; ++s) {
      const double mu_k = s == 0 ? lin.mu1[k] : lin.mu2[k];
      for (int e = 0; e < cnt; ++e) {
        trip.emplace_back(static_cast<int>(s * n + st[e].row), static_cast<int>(s * n + k), -st[e].weight * mu_k);
      }
    }
    const int kx = static_cast<int>(k % static_cast<std::size_t>(g.nx()));
    const int ky = static_cast<int>(k / static_cast<std::size_t>(g.nx()));
    for (std::size_t c = 0; c < couplings_.size(); ++c) {
      const Coupling& cp = couplings_[c];
      const double uk = lin.u[cp.target * n + k];
      if (uk == 0.0) continue;
      for (const Tap& t : taps[c]) {
        const std::size_t col = cp.source * n + g.index(kx - t.mx, ky - t.my);
        const double base = uk * cp.coeff * vol * t.value;
        for (int e = 0; e < cnt; ++e) {
          trip.emplace_back(static_cast<int>(cp.target * n + st[e].row), static_cast<int>(col),
                            -st[e].weight * base);
        }
      }
    }
  }
  const bool react = !is_zero_reaction(params_.reaction);
  for (std::size_t i = 0; i < n; ++i) {
    const ReactionPoint p = react ? lin.dr[i] : ReactionPoint{};
    trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0 / dt - p.d1_du1);
    trip.emplace_back(static_cast<int>(n + i), static_cast<int>(n + i), 1.0 / dt - p.d2_du2);
    if (react) {
      trip.emplace_back(static_cast<int>(i), static_cast<int>(n + i), -p.d1_du2);
      trip.emplace_back(static_cast<int>(n + i), static_cast<int>(i), -p.d2_du1);
    }
  }
  Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * n));
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

int SktSystem::kernel_reach() const {
  const PeriodicGrid& g = grid();
  int reach = 0;
  for (const Coupling& cp : couplings_) {
    const DiscreteKernel& K = kernel(cp.kernel);
    for (int l = 0; l < g.ny(); ++l) {
      for (int m = 0; m < g.nx(); ++m) {
        if (K.value(m, l) == 0.0) continue;
        reach = std::max(reach, std::abs(representative(m, g.nx())));
        if (g.dimension() == 2) reach = std::max(reach, std::abs(representative(l, g.ny())));
      }
    }
  }
  return reach;
}

}  // namespace nlskt
