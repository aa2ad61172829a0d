#pragma once

#include <array>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "nlskt/grid.hpp"
#include "nlskt/kernels.hpp"

namespace nlskt {

struct State {
  CellField u1;
  CellField u2;
  double time = 0.0;
};

struct ZeroReaction {};

// R_j = u_j (a_j0 - a_j1 u1 - a_j2 u2)
struct LotkaVolterra {
  std::array<double, 3> a1{0.0, 0.0, 0.0};
  std::array<double, 3> a2{0.0, 0.0, 0.0};
};

// R1 = a u1 + e u1^2 - b u1 u2,  R2 = -d u2^2 + c u1 u2
struct SegelLevin {
  double a = 1.0, b = 1.0, c = 1.0, d = 1.0, e = 1.0 / 3.0;
};

// R1 = a u1 + e u1^2 - d u1^3 - b u1 u2,  R2 = -f u2 - g u2^2 + c u1 u2
struct MimuraNishiuraYamaguti {
  double a = 35.0 / 9.0, b = 1.0, c = 1.0, d = 1.0 / 9.0, e = 16.0 / 9.0, f = 1.0, g = 2.0 / 5.0;
};

using ReactionSpec = std::variant<ZeroReaction, LotkaVolterra, SegelLevin, MimuraNishiuraYamaguti>;

bool is_zero_reaction(const ReactionSpec& spec);

// Value and partial derivatives at one point.
struct ReactionPoint {
  double r1 = 0.0, r2 = 0.0;
  double d1_du1 = 0.0, d1_du2 = 0.0, d2_du1 = 0.0, d2_du2 = 0.0;
};

ReactionPoint evaluate_reaction(const ReactionSpec& spec, double u1, double u2);

struct DiffusionCoefficients {
  double d1 = 0.0, d2 = 0.0, d11 = 0.0, d22 = 0.0, d12 = 1.0, d21 = 1.0;
};

struct SchemeParams {
  DiffusionCoefficients coeffs;
  DiscreteKernel sigma1, sigma2, rho1, rho2;
  ReactionSpec reaction = ZeroReaction{};

  const PeriodicGrid& grid() const { return rho1.grid(); }
};

// Validates signs and that every kernel lives on one grid. d12, d21 may be 0
// (Turing runs); entropy functionals then refuse to evaluate.
SchemeParams make_scheme_params(const DiffusionCoefficients& coeffs, DiscreteKernel sigma1, DiscreteKernel sigma2,
                                DiscreteKernel rho1, DiscreteKernel rho2, ReactionSpec reaction = ZeroReaction{});

// d12, d21 > 0, even sigma's, rho2 the reflection of rho1 and Zero reaction.
bool satisfies_entropy_hypotheses(const SchemeParams& params, double rel_tol = 1e-12);

// Initial data as a sum of terms. Boxes and harmonics are averaged exactly, general
// functions with 10-point Gauss-Legendre per cell (per axis).
struct ConstantTerm {
  double value = 0.0;
};
struct BoxTerm {
  double height = 1.0;
  double x0 = 0.0, x1 = 0.0;
  double y0 = 0.0, y1 = 0.0;  // ignored in 1D
};
// amplitude * cos(2*pi*x/Lx + phase)
struct HarmonicTerm {
  double amplitude = 1.0;
  double phase = 0.0;
};
struct FunctionTerm {
  std::function<double(double, double)> fn;
};
using ProfileTerm = std::variant<ConstantTerm, BoxTerm, HarmonicTerm, FunctionTerm>;
using Profile = std::vector<ProfileTerm>;

CellField cell_averages(const Profile& profile, const PeriodicGrid& grid);

State initial_state(const Profile& u1, const Profile& u2, const PeriodicGrid& grid);

}  // namespace nlskt
