#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nlskt/grid.hpp"

namespace nlskt {

struct DiracKernel {};

// delta^{-1} * indicator of [-delta/2, delta/2].
struct IndicatorKernel {
  double width = 1.0;
};

// cos(2*pi*x/L) + 1 on the grid period; not normalized (integral = L).
struct SmoothCosKernel {};

// C_r [x^2 on (-r,r), (x-2r)^2 on [r,2r), (x+2r)^2 on (-2r,-r]], unit mass.
struct HuntingKernel {
  double radius = 1.0;
};

// Indicator of inner_sq < x^2+y^2 < outer_sq, optionally restricted to x,y >= 0; unit mass.
struct AnnulusKernel {
  double inner_sq = 3.0 / 8.0;
  double outer_sq = 0.5;
  bool quadrant_restricted = false;
};

// Pointwise kernel evaluated at the offset (x, y); y is ignored in 1D.
// Cell averages use Gauss-Legendre quadrature on the representative offset cell.
struct CustomKernel {
  std::function<double(double, double)> fn;
  bool normalize = false;
  std::string name = "custom";
};

using KernelSpec = std::variant<DiracKernel, IndicatorKernel, SmoothCosKernel, HuntingKernel, AnnulusKernel, CustomKernel>;

std::string kernel_name(const KernelSpec& spec);

namespace detail {
class ConvolutionEngine;
}

// Cell-averaged kernel values rho_m for the offset cell centred at m*dx (m*dx, l*dy in 2D),
// stored at index m mod nx (+ nx*(l mod ny)).
class DiscreteKernel {
 public:
  DiscreteKernel() = default;
  DiscreteKernel(PeriodicGrid grid, std::vector<double> values, std::optional<KernelSpec> source = std::nullopt);

  static DiscreteKernel dirac(const PeriodicGrid& grid);

  const PeriodicGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double value(int mx, int my = 0) const { return values_[grid_.index(mx, my)]; }
  bool is_dirac() const { return is_dirac_; }
  const std::optional<KernelSpec>& source() const { return source_; }

  // cell_volume * sum(rho)
  double total_weight() const;
  bool is_even(double rel_tol = 1e-12) const;
  DiscreteKernel reflected() const;

  // out_i = V * sum_n rho_{i-n} u_n, V the cell volume. out = u for Dirac.
  void convolve(std::span<const double> u, std::span<double> out) const;
  CellField convolve(std::span<const double> u) const;

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
  bool is_dirac_ = false;
  std::optional<KernelSpec> source_;
  std::shared_ptr<const detail::ConvolutionEngine> engine_;
};

DiscreteKernel discretize(const KernelSpec& spec, const PeriodicGrid& grid);

CellField convolve(const DiscreteKernel& kernel, std::span<const double> u);

// O(N^2) reference summation, used by tests and for tiny grids.
CellField convolve_direct(const DiscreteKernel& kernel, std::span<const double> u);

// Sup norm of the Laplacian of the continuous kernel: analytic for SmoothCos,
// sampled (1e4 points per period and axis) for Custom. Throws PreconditionError for
// kernels that are not twice differentiable.
double kernel_laplacian_sup(const KernelSpec& spec, const PeriodicGrid& grid);

// Area of {x in [x0,x1], y in [y0,y1], x^2+y^2 < r^2}.
double disk_rectangle_area(double radius, double x0, double x1, double y0, double y1);

}  // namespace nlskt
