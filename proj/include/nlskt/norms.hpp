#pragma once

#include <limits>
#include <span>
#include <vector>

#include "nlskt/grid.hpp"
#include "nlskt/model.hpp"

namespace nlskt {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct NormKind {
  enum class Tag { Lp, W1pSeminorm, BV };
  Tag tag = Tag::Lp;
  double p = 2.0;
};

// (sum V |u_i|^p)^{1/p}; max |u_i| for p = inf.
double lp_norm(std::span<const double> u, const PeriodicGrid& grid, double p);

// (sum_i V sum_axes |(u_{i+e} - u_i)/h|^p)^{1/p}, periodic differences.
double w1p_seminorm(std::span<const double> u, const PeriodicGrid& grid, double p);

double bv_norm(std::span<const double> u, const PeriodicGrid& grid);

double evaluate_norm(const NormKind& kind, std::span<const double> u, const PeriodicGrid& grid);

// (sum_k dt ||u^k||_{L2}^2)^{1/2}
double l2_space_time(std::span<const CellField> trajectory, const PeriodicGrid& grid, double dt);

// (x (log x - 1) + 1) / d with the value 1/d at 0.
double entropy_density(double x, double d);

double entropy(std::span<const double> u1, std::span<const double> u2, const PeriodicGrid& grid, double d12,
               double d21);

// Discrete entropy dissipation; O(nnz(kernel) * cells) per kernel term.
double dissipation(std::span<const double> u1, std::span<const double> u2, const SchemeParams& params);

// L1 distance of the cumulative distributions on [0, L] (1D, equal masses).
double wasserstein1(std::span<const double> f, std::span<const double> g, const PeriodicGrid& grid);

}  // namespace nlskt
