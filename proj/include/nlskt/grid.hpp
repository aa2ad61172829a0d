#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nlskt {

using CellField = std::vector<double>;

// Uniform periodic grid on [0,Lx) (x [0,Ly)). Cell i covers [i*dx, (i+1)*dx),
// 2D index is i + nx*j.
class PeriodicGrid {
 public:
  PeriodicGrid() = default;

  static PeriodicGrid make_1d(int n_cells, double length);
  static PeriodicGrid make_2d(int nx, int ny, double lx, double ly);

  int dimension() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  double cell_volume() const { return dim_ == 1 ? dx_ : dx_ * dy_; }

  int wrap_x(int i) const { return ((i % nx_) + nx_) % nx_; }
  int wrap_y(int j) const { return ((j % ny_) + ny_) % ny_; }
  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(wrap_x(i)) + static_cast<std::size_t>(nx_) * static_cast<std::size_t>(wrap_y(j));
  }
  std::size_t neighbor(std::size_t cell, int axis, int step) const;

  double center_x(int i) const { return (i + 0.5) * dx_; }
  double center_y(int j) const { return (j + 0.5) * dy_; }

  bool operator==(const PeriodicGrid&) const = default;

 private:
  int dim_ = 1;
  int nx_ = 0;
  int ny_ = 1;
  double lx_ = 0.0;
  double ly_ = 1.0;
  double dx_ = 0.0;
  double dy_ = 1.0;
};

PeriodicGrid make_periodic_1d(int n_cells, double length);
PeriodicGrid make_periodic_2d(int nx, int ny, double lx, double ly);

// Average of a 1D fine field over the coarse cells; requires nested grids.
CellField project_to_coarser(std::span<const double> fine, const PeriodicGrid& coarse);

// Dirichlet-free bounded interval (0,1) with ell cells; interface p sits at p*dx.
class BoundedGrid1D {
 public:
  explicit BoundedGrid1D(int n_cells);
  int n_cells() const { return n_; }
  double dx() const { return dx_; }
  double interface_position(int p) const { return p * dx_; }
  double center(int i) const { return (i + 0.5) * dx_; }

 private:
  int n_;
  double dx_;
};

struct TimeGrid {
  double t_final = 0.0;
  int n_steps = 0;
  double dt = 0.0;
};

TimeGrid make_time_grid(double t_final, int n_steps);

}  // namespace nlskt
