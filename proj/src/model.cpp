#include "nlskt/model.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "nlskt/errors.hpp"

namespace nlskt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite and >= 0");
}

// Length of [a,b] intersected with the periodic copies of [lo,hi].
double periodic_overlap(double a, double b, double lo, double hi, double period) {
  double s = 0.0;
  for (int p = -2; p <= 2; ++p) {
    s += std::max(0.0, std::min(b, hi + p * period) - std::max(a, lo + p * period));
  }
  return s;
}

}  // namespace

bool is_zero_reaction(const ReactionSpec& spec) { return std::holds_alternative<ZeroReaction>(spec); }

ReactionPoint evaluate_reaction(const ReactionSpec& spec, double u1, double u2) {
  return std::visit(overloaded{[](const ZeroReaction&) { return ReactionPoint{}; },
                               [&](const LotkaVolterra& lv) {
                                 const auto& a = lv.a1;
                                 const auto& b = lv.a2;
                                 ReactionPoint p;
                                 const double g1 = a[0] - a[1] * u1 - a[2] * u2;
                                 const double g2 = b[0] - b[1] * u1 - b[2] * u2;
                                 p.r1 = u1 * g1;
                                 p.r2 = u2 * g2;
                                 p.d1_du1 = g1 - a[1] * u1;
                                 p.d1_du2 = -a[2] * u1;
                                 p.d2_du1 = -b[1] * u2;
                                 p.d2_du2 = g2 - b[2] * u2;
                                 return p;
                               },
                               [&](const SegelLevin& s) {
                                 ReactionPoint p;
                                 p.r1 = s.a * u1 + s.e * u1 * u1 - s.b * u1 * u2;
                                 p.r2 = -s.d * u2 * u2 + s.c * u1 * u2;
                                 p.d1_du1 = s.a + 2.0 * s.e * u1 - s.b * u2;
                                 p.d1_du2 = -s.b * u1;
                                 p.d2_du1 = s.c * u2;
                                 p.d2_du2 = -2.0 * s.d * u2 + s.c * u1;
                                 return p;
                               },
                               [&](const MimuraNishiuraYamaguti& m) {
                                 ReactionPoint p;
                                 p.r1 = m.a * u1 + m.e * u1 * u1 - m.d * u1 * u1 * u1 - m.b * u1 * u2;
                                 p.r2 = -m.f * u2 - m.g * u2 * u2 + m.c * u1 * u2;
                                 p.d1_du1 = m.a + 2.0 * m.e * u1 - 3.0 * m.d * u1 * u1 - m.b * u2;
                                 p.d1_du2 = -m.b * u1;
                                 p.d2_du1 = m.c * u2;
                                 p.d2_du2 = -m.f - 2.0 * m.g * u2 + m.c * u1;
                                 return p;
                               }},
                    spec);
}

SchemeParams make_scheme_params(const DiffusionCoefficients& c, DiscreteKernel sigma1, DiscreteKernel sigma2,
                                DiscreteKernel rho1, DiscreteKernel rho2, ReactionSpec reaction) {
  require_nonnegative(c.d1, "d1");
  require_nonnegative(c.d2, "d2");
  require_nonnegative(c.d11, "d11");
  require_nonnegative(c.d22, "d22");
  require_nonnegative(c.d12, "d12");
  require_nonnegative(c.d21, "d21");
  const PeriodicGrid& g = rho1.grid();
  if (!(sigma1.grid() == g) || !(sigma2.grid() == g) || !(rho2.grid() == g)) {
    throw ConfigError("all kernels must be discretized on the same grid");
  }
  if (const auto* lv = std::get_if<LotkaVolterra>(&reaction)) {
    for (double v : lv->a1) require_nonnegative(v, "Lotka-Volterra coefficient");
    for (double v : lv->a2) require_nonnegative(v, "Lotka-Volterra coefficient");
  }
  return SchemeParams{c, std::move(sigma1), std::move(sigma2), std::move(rho1), std::move(rho2), std::move(reaction)};
}

bool satisfies_entropy_hypotheses(const SchemeParams& p, double rel_tol) {
  if (!(p.coeffs.d12 > 0.0) || !(p.coeffs.d21 > 0.0)) return false;
  if (!is_zero_reaction(p.reaction)) return false;
  if (!p.sigma1.is_even(rel_tol) || !p.sigma2.is_even(rel_tol)) return false;
  const PeriodicGrid& g = p.grid();
  double scale = 0.0;
  for (double v : p.rho1.values()) scale = std::max(scale, std::abs(v));
  for (int l = 0; l < g.ny(); ++l) {
    for (int m = 0; m < g.nx(); ++m) {
      if (std::abs(p.rho1.value(m, l) - p.rho2.value(-m, -l)) > rel_tol * scale) return false;
    }
  }
  return true;
}

CellField cell_averages(const Profile& profile, const PeriodicGrid& grid) {
  CellField out(grid.size(), 0.0);
  const double dx = grid.dx();
  const double dy = grid.dy();
  const bool two_d = grid.dimension() == 2;
  const double nu = 2.0 * std::numbers::pi / grid.lx();
  using Q = boost::math::quadrature::gauss<double, 10>;
  for (const ProfileTerm& term : profile) {
    std::visit(overloaded{[&](const ConstantTerm& c) {
                            for (double& v : out) v += c.value;
                          },
                          [&](const BoxTerm& b) {
                            for (int j = 0; j < grid.ny(); ++j) {
                              const double fy =
                                  two_d ? periodic_overlap(j * dy, (j + 1) * dy, b.y0, b.y1, grid.ly()) / dy : 1.0;
                              if (fy == 0.0) continue;
                              for (int i = 0; i < grid.nx(); ++i) {
                                const double fx = periodic_overlap(i * dx, (i + 1) * dx, b.x0, b.x1, grid.lx()) / dx;
                                out[grid.index(i, j)] += b.height * fx * fy;
                              }
                            }
                          },
                          [&](const HarmonicTerm& h) {
                            for (int i = 0; i < grid.nx(); ++i) {
                              const double avg = h.amplitude *
                                                 (std::sin(nu * (i + 1) * dx + h.phase) - std::sin(nu * i * dx + h.phase)) /
                                                 (nu * dx);
                              for (int j = 0; j < grid.ny(); ++j) out[grid.index(i, j)] += avg;
                            }
                          },
                          [&](const FunctionTerm& f) {
                            for (int j = 0; j < grid.ny(); ++j) {
                              for (int i = 0; i < grid.nx(); ++i) {
                                const double x0 = i * dx;
                                double avg;
                                if (two_d) {
                                  const double y0 = j * dy;
                                  avg = Q::integrate(
                                            [&](double y) {
                                              return Q::integrate([&](double x) { return f.fn(x, y); }, x0, x0 + dx);
                                            },
                                            y0, y0 + dy) /
                                        (dx * dy);
                                } else {
                                  avg = Q::integrate([&](double x) { return f.fn(x, 0.0); }, x0, x0 + dx) / dx;
                                }
                                out[grid.index(i, j)] += avg;
                              }
                            }
                          }},
               term);
  }
  return out;
}

State initial_state(const Profile& u1, const Profile& u2, const PeriodicGrid& grid) {
  State s{cell_averages(u1, grid), cell_averages(u2, grid), 0.0};
  for (CellField* f : {&s.u1, &s.u2}) {
    for (double& v : *f) {
      if (v < 0.0) {
        // rounding of exact averages of non-negative data
        if (v > -1e-13) v = 0.0;
        else throw DomainError("initial data takes negative values");
      }
    }
  }
  return s;
}

}  // namespace nlskt
