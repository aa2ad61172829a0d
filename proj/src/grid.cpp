#include "nlskt/grid.hpp"

#include <cmath>
#include <string>

#include "nlskt/errors.hpp"

namespace nlskt {

namespace {

void require_positive_length(double length, const char* what) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

PeriodicGrid PeriodicGrid::make_1d(int n_cells, double length) {
  if (n_cells < 2) throw ConfigError("periodic grid needs at least 2 cells");
  require_positive_length(length, "period");
  PeriodicGrid g;
  g.dim_ = 1;
  g.nx_ = n_cells;
  g.ny_ = 1;
  g.lx_ = length;
  g.ly_ = 1.0;
  g.dx_ = length / n_cells;
  g.dy_ = 1.0;
  return g;
}

PeriodicGrid PeriodicGrid::make_2d(int nx, int ny, double lx, double ly) {
  if (nx < 2 || ny < 2) throw ConfigError("periodic grid needs at least 2 cells per axis");
  require_positive_length(lx, "period Lx");
  require_positive_length(ly, "period Ly");
  PeriodicGrid g;
  g.dim_ = 2;
  g.nx_ = nx;
  g.ny_ = ny;
  g.lx_ = lx;
  g.ly_ = ly;
  g.dx_ = lx / nx;
  g.dy_ = ly / ny;
  return g;
}

std::size_t PeriodicGrid::neighbor(std::size_t cell, int axis, int step) const {
  const int i = static_cast<int>(cell % static_cast<std::size_t>(nx_));
  const int j = static_cast<int>(cell / static_cast<std::size_t>(nx_));
  return axis == 0 ? index(i + step, j) : index(i, j + step);
}

PeriodicGrid make_periodic_1d(int n_cells, double length) { return PeriodicGrid::make_1d(n_cells, length); }

PeriodicGrid make_periodic_2d(int nx, int ny, double lx, double ly) {
  return PeriodicGrid::make_2d(nx, ny, lx, ly);
}

CellField project_to_coarser(std::span<const double> fine, const PeriodicGrid& coarse) {
  if (coarse.dimension() != 1) throw ConfigError("projection is implemented for 1D grids");
  const std::size_t nc = coarse.size();
  if (fine.size() < nc || fine.size() % nc != 0) {
    throw ConfigError("fine grid is not a refinement of the coarse grid");
  }
  const std::size_t ratio = fine.size() / nc;
  CellField out(nc, 0.0);
  for (std::size_t i = 0; i < nc; ++i) {
    double s = 0.0;
    for (std::size_t m = 0; m < ratio; ++m) s += fine[i * ratio + m];
    out[i] = s / static_cast<double>(ratio);
  }
  return out;
}

BoundedGrid1D::BoundedGrid1D(int n_cells) : n_(n_cells), dx_(0.0) {
  if (n_cells < 2) throw ConfigError("bounded grid needs at least 2 cells");
  dx_ = 1.0 / n_cells;
}

TimeGrid make_time_grid(double t_final, int n_steps) {
  if (!(t_final > 0.0) || n_steps < 1) throw ConfigError("time grid needs T > 0 and at least one step");
  return TimeGrid{t_final, n_steps, t_final / n_steps};
}

}  // namespace nlskt
