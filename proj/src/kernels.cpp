#include "nlskt/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include "nlskt/errors.hpp"

namespace nlskt {

namespace detail {

namespace {
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

// Either a sparse direct sum over the non-zero offsets or an FFTW circulant product.
class ConvolutionEngine {
 public:
  ConvolutionEngine(const PeriodicGrid& grid, std::span<const double> values) : grid_(grid) {
    const double vol = grid.cell_volume();
    const std::size_t n = grid.size();
    std::size_t nnz = 0;
    for (double v : values) nnz += (v != 0.0);
    const double logn = std::log2(static_cast<double>(n));
    use_fft_ = n > 256 && static_cast<double>(nnz) > 16.0 + 2.0 * logn;
    if (!use_fft_) {
      for (int l = 0; l < grid.ny(); ++l) {
        for (int m = 0; m < grid.nx(); ++m) {
          const double v = values[grid.index(m, l)];
          if (v != 0.0) taps_.push_back({m, l, vol * v});
        }
      }
      return;
    }
    const int nx = grid.nx();
    const int ny = grid.ny();
    const int nxc = nx / 2 + 1;
    spectrum_.assign(static_cast<std::size_t>(ny) * nxc, {0.0, 0.0});
    std::vector<double> in(values.begin(), values.end());
    for (double& v : in) v *= vol / static_cast<double>(n);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    auto* out = reinterpret_cast<fftw_complex*>(spectrum_.data());
    std::vector<double> scratch_r(n);
    std::vector<std::complex<double>> scratch_c(spectrum_.size());
    auto* sc = reinterpret_cast<fftw_complex*>(scratch_c.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (grid.dimension() == 1) {
      forward_ = fftw_plan_dft_r2c_1d(nx, scratch_r.data(), sc, flags);
      backward_ = fftw_plan_dft_c2r_1d(nx, sc, scratch_r.data(), flags | FFTW_DESTROY_INPUT);
    } else {
      forward_ = fftw_plan_dft_r2c_2d(ny, nx, scratch_r.data(), sc, flags);
      backward_ = fftw_plan_dft_c2r_2d(ny, nx, sc, scratch_r.data(), flags | FFTW_DESTROY_INPUT);
    }
    if (forward_ == nullptr || backward_ == nullptr) throw SolverFailure("FFTW planning failed");
    fftw_execute_dft_r2c(forward_, in.data(), out);
  }

  ~ConvolutionEngine() {
    if (forward_ != nullptr || backward_ != nullptr) {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      if (forward_ != nullptr) fftw_destroy_plan(forward_);
      if (backward_ != nullptr) fftw_destroy_plan(backward_);
    }
  }

  ConvolutionEngine(const ConvolutionEngine&) = delete;
  ConvolutionEngine& operator=(const ConvolutionEngine&) = delete;

  void apply(std::span<const double> u, std::span<double> out) const {
    const int nx = grid_.nx();
    const int ny = grid_.ny();
    if (!use_fft_) {
      std::fill(out.begin(), out.end(), 0.0);
      for (const Tap& t : taps_) {
        for (int j = 0; j < ny; ++j) {
          const int js = (j - t.my + ny) % ny;
          double* o = out.data() + static_cast<std::size_t>(j) * nx;
          const double* s = u.data() + static_cast<std::size_t>(js) * nx;
          // o[i] += w * s[(i - mx) mod nx], split into two contiguous runs
          const int mx = t.mx;
          for (int i = 0; i < mx; ++i) o[i] += t.w * s[i - mx + nx];
          for (int i = mx; i < nx; ++i) o[i] += t.w * s[i - mx];
        }
      }
      return;
    }
    std::vector<double> buf(u.begin(), u.end());
    std::vector<std::complex<double>> spec(spectrum_.size());
    auto* sc = reinterpret_cast<fftw_complex*>(spec.data());
    fftw_execute_dft_r2c(forward_, buf.data(), sc);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= spectrum_[k];
    fftw_execute_dft_c2r(backward_, sc, out.data());
  }

 private:
  struct Tap {
    int mx;
    int my;
    double w;
  };
  PeriodicGrid grid_;
  bool use_fft_ = false;
  std::vector<Tap> taps_;
  std::vector<std::complex<double>> spectrum_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace detail

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int representative(int m, int n) { return m <= n / 2 ? m : m - n; }

double overlap(double a, double b, double c, double d) { return std::max(0.0, std::min(b, d) - std::max(a, c)); }

// Integral of C*(x - c)^2 over [a,b] intersected with [lo,hi].
double quad_piece(double a, double b, double lo, double hi, double c) {
  const double x0 = std::max(a, lo);
  const double x1 = std::min(b, hi);
  if (x1 <= x0) return 0.0;
  return (std::pow(x1 - c, 3) - std::pow(x0 - c, 3)) / 3.0;
}

double hunting_integral(double a, double b, double r) {
  const double cr = 3.0 / (4.0 * r * r * r);
  return cr * (quad_piece(a, b, -2.0 * r, -r, -2.0 * r) + quad_piece(a, b, -r, r, 0.0) +
               quad_piece(a, b, r, 2.0 * r, 2.0 * r));
}

void require_dimension(const PeriodicGrid& grid, int dim, const char* name) {
  if (grid.dimension() != dim) {
    throw ConfigError(std::string(name) + " kernel needs a " + std::to_string(dim) + "D grid");
  }
}

std::vector<double> discretize_1d(const PeriodicGrid& grid, const std::function<double(double, double)>& cell_integral) {
  const int n = grid.nx();
  const double dx = grid.dx();
  std::vector<double> values(grid.size(), 0.0);
  for (int m = 0; m < n; ++m) {
    const double c = representative(m, n) * dx;
    values[static_cast<std::size_t>(m)] = cell_integral(c - 0.5 * dx, c + 0.5 * dx) / dx;
  }
  return values;
}

double ring_area(const AnnulusKernel& k, double x0, double x1, double y0, double y1) {
  if (k.quadrant_restricted) {
    x0 = std::max(x0, 0.0);
    y0 = std::max(y0, 0.0);
    if (x1 <= x0 || y1 <= y0) return 0.0;
  }
  return disk_rectangle_area(std::sqrt(k.outer_sq), x0, x1, y0, y1) -
         disk_rectangle_area(std::sqrt(k.inner_sq), x0, x1, y0, y1);
}

void normalize_unit(std::vector<double>& values, const PeriodicGrid& grid, const char* name) {
  double s = 0.0;
  for (double v : values) s += v;
  s *= grid.cell_volume();
  if (!(s > 0.0)) throw PreconditionError(std::string(name) + " kernel has zero total weight on this grid");
  for (double& v : values) v /= s;
}

double gauss_average_1d(const std::function<double(double, double)>& fn, double a, double b) {
  using Q = boost::math::quadrature::gauss<double, 10>;
  return Q::integrate([&](double x) { return fn(x, 0.0); }, a, b) / (b - a);
}

double gauss_average_2d(const std::function<double(double, double)>& fn, double x0, double x1, double y0, double y1) {
  using Q = boost::math::quadrature::gauss<double, 10>;
  const double inner = Q::integrate(
      [&](double y) { return Q::integrate([&](double x) { return fn(x, y); }, x0, x1); }, y0, y1);
  return inner / ((x1 - x0) * (y1 - y0));
}

}  // namespace

std::string kernel_name(const KernelSpec& spec) {
  return std::visit(overloaded{[](const DiracKernel&) { return std::string("dirac"); },
                               [](const IndicatorKernel&) { return std::string("indicator"); },
                               [](const SmoothCosKernel&) { return std::string("smooth"); },
                               [](const HuntingKernel&) { return std::string("hunting"); },
                               [](const AnnulusKernel& a) {
                                 return std::string(a.quadrant_restricted ? "annulus_quadrant" : "annulus");
                               },
                               [](const CustomKernel& c) { return c.name; }},
                    spec);
}

DiscreteKernel::DiscreteKernel(PeriodicGrid grid, std::vector<double> values, std::optional<KernelSpec> source)
    : grid_(grid), values_(std::move(values)), source_(std::move(source)) {
  if (values_.size() != grid_.size()) throw ConfigError("kernel values do not match the grid size");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("kernel values must be finite and non-negative");
  }
  is_dirac_ = source_.has_value() && std::holds_alternative<DiracKernel>(*source_);
  if (!is_dirac_) engine_ = std::make_shared<const detail::ConvolutionEngine>(grid_, values_);
}

DiscreteKernel DiscreteKernel::dirac(const PeriodicGrid& grid) {
  std::vector<double> v(grid.size(), 0.0);
  v[0] = 1.0 / grid.cell_volume();
  return DiscreteKernel(grid, std::move(v), KernelSpec{DiracKernel{}});
}

double DiscreteKernel::total_weight() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.cell_volume();
}

bool DiscreteKernel::is_even(double rel_tol) const {
  double scale = 0.0;
  for (double v : values_) scale = std::max(scale, std::abs(v));
  for (int l = 0; l < grid_.ny(); ++l) {
    for (int m = 0; m < grid_.nx(); ++m) {
      if (std::abs(value(m, l) - value(-m, -l)) > rel_tol * scale) return false;
    }
  }
  return true;
}

DiscreteKernel DiscreteKernel::reflected() const {
  if (is_dirac_) return *this;
  std::vector<double> v(values_.size());
  for (int l = 0; l < grid_.ny(); ++l) {
    for (int m = 0; m < grid_.nx(); ++m) v[grid_.index(m, l)] = value(-m, -l);
  }
  return DiscreteKernel(grid_, std::move(v));
}

void DiscreteKernel::convolve(std::span<const double> u, std::span<double> out) const {
  if (u.size() != grid_.size() || out.size() != grid_.size()) {
    throw ConfigError("convolution input does not live on the kernel grid");
  }
  if (is_dirac_) {
    std::copy(u.begin(), u.end(), out.begin());
    return;
  }
  engine_->apply(u, out);
}

CellField DiscreteKernel::convolve(std::span<const double> u) const {
  CellField out(u.size());
  convolve(u, out);
  return out;
}

CellField convolve(const DiscreteKernel& kernel, std::span<const double> u) { return kernel.convolve(u); }

CellField convolve_direct(const DiscreteKernel& kernel, std::span<const double> u) {
  const PeriodicGrid& g = kernel.grid();
  if (u.size() != g.size()) throw ConfigError("convolution input does not live on the kernel grid");
  if (kernel.is_dirac()) return CellField(u.begin(), u.end());
  CellField out(u.size(), 0.0);
  const double vol = g.cell_volume();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      double s = 0.0;
      for (int l = 0; l < g.ny(); ++l) {
        for (int n = 0; n < g.nx(); ++n) s += kernel.value(i - n, j - l) * u[g.index(n, l)];
      }
      out[g.index(i, j)] = vol * s;
    }
  }
  return out;
}

DiscreteKernel discretize(const KernelSpec& spec, const PeriodicGrid& grid) {
  const double L = grid.lx();
  std::vector<double> values = std::visit(
      overloaded{
          [&](const DiracKernel&) {
            std::vector<double> v(grid.size(), 0.0);
            v[0] = 1.0 / grid.cell_volume();
            return v;
          },
          [&](const IndicatorKernel& k) {
            require_dimension(grid, 1, "indicator");
            if (!(k.width > 0.0) || k.width > L * (1.0 + 1e-12)) {
              throw ConfigError("indicator kernel width must lie in (0, L]");
            }
            const double h = 0.5 * k.width;
            return discretize_1d(grid, [&](double a, double b) {
              double s = 0.0;
              for (int p = -1; p <= 1; ++p) s += overlap(a + p * L, b + p * L, -h, h);
              return s / k.width;
            });
          },
          [&](const SmoothCosKernel&) {
            require_dimension(grid, 1, "smooth");
            const double nu = 2.0 * std::numbers::pi / L;
            return discretize_1d(grid, [&](double a, double b) {
              return (b - a) + (std::sin(nu * b) - std::sin(nu * a)) / nu;
            });
          },
          [&](const HuntingKernel& k) {
            require_dimension(grid, 1, "hunting");
            if (!(k.radius > 0.0) || 4.0 * k.radius > L * (1.0 + 1e-12)) {
              throw ConfigError("hunting kernel needs radius > 0 and support 4r <= L");
            }
            auto v = discretize_1d(grid, [&](double a, double b) {
              double s = 0.0;
              for (int p = -1; p <= 1; ++p) s += hunting_integral(a + p * L, b + p * L, k.radius);
              return s;
            });
            normalize_unit(v, grid, "hunting");
            return v;
          },
          [&](const AnnulusKernel& k) {
            require_dimension(grid, 2, "annulus");
            if (!(k.inner_sq >= 0.0) || !(k.outer_sq > k.inner_sq)) {
              throw ConfigError("annulus needs 0 <= inner_sq < outer_sq");
            }
            const double ro = std::sqrt(k.outer_sq);
            if (2.0 * ro > grid.lx() || 2.0 * ro > grid.ly()) throw ConfigError("annulus does not fit in the domain");
            const double dx = grid.dx();
            const double dy = grid.dy();
            std::vector<double> v(grid.size(), 0.0);
            for (int l = 0; l < grid.ny(); ++l) {
              for (int m = 0; m < grid.nx(); ++m) {
                const double cx = representative(m, grid.nx()) * dx;
                const double cy = representative(l, grid.ny()) * dy;
                double area = 0.0;
                for (int p = -1; p <= 1; ++p) {
                  for (int q = -1; q <= 1; ++q) {
                    const double ox = cx + p * grid.lx();
                    const double oy = cy + q * grid.ly();
                    area += ring_area(k, ox - 0.5 * dx, ox + 0.5 * dx, oy - 0.5 * dy, oy + 0.5 * dy);
                  }
                }
                v[grid.index(m, l)] = area / (dx * dy);
              }
            }
            normalize_unit(v, grid, "annulus");
            return v;
          },
          [&](const CustomKernel& k) {
            if (!k.fn) throw ConfigError("custom kernel has no function");
            std::vector<double> v(grid.size(), 0.0);
            const double dx = grid.dx();
            const double dy = grid.dy();
            for (int l = 0; l < grid.ny(); ++l) {
              for (int m = 0; m < grid.nx(); ++m) {
                const double cx = representative(m, grid.nx()) * dx;
                double val;
                if (grid.dimension() == 1) {
                  val = gauss_average_1d(k.fn, cx - 0.5 * dx, cx + 0.5 * dx);
                } else {
                  const double cy = representative(l, grid.ny()) * dy;
                  val = gauss_average_2d(k.fn, cx - 0.5 * dx, cx + 0.5 * dx, cy - 0.5 * dy, cy + 0.5 * dy);
                }
                if (val < 0.0) {
                  if (val > -1e-14) val = 0.0;
                  else throw ConfigError("custom kernel takes negative values");
                }
                v[grid.index(m, l)] = val;
              }
            }
            if (k.normalize) normalize_unit(v, grid, "custom");
            return v;
          }},
      spec);
  return DiscreteKernel(grid, std::move(values), spec);
}

double kernel_laplacian_sup(const KernelSpec& spec, const PeriodicGrid& grid) {
  if (std::holds_alternative<SmoothCosKernel>(spec)) {
    const double nu = 2.0 * std::numbers::pi / grid.lx();
    return nu * nu;
  }
  const auto* custom = std::get_if<CustomKernel>(&spec);
  if (custom == nullptr) {
    throw PreconditionError("kernel '" + kernel_name(spec) + "' is not twice differentiable");
  }
  constexpr int samples = 10000;
  const double hx = grid.lx() / samples;
  double best = 0.0;
  if (grid.dimension() == 1) {
    for (int s = 0; s < samples; ++s) {
      const double x = -0.5 * grid.lx() + s * hx;
      const double lap = (custom->fn(x + hx, 0.0) - 2.0 * custom->fn(x, 0.0) + custom->fn(x - hx, 0.0)) / (hx * hx);
      best = std::max(best, std::abs(lap));
    }
  } else {
    // 1e3 x 1e3 lattice in 2D
    constexpr int per_axis = 1000;
    const double sx = grid.lx() / per_axis;
    const double sy = grid.ly() / per_axis;
    for (int t = 0; t < per_axis; ++t) {
      for (int s = 0; s < per_axis; ++s) {
        const double x = -0.5 * grid.lx() + s * sx;
        const double y = -0.5 * grid.ly() + t * sy;
        const double f = custom->fn(x, y);
        const double lap = (custom->fn(x + sx, y) - 2.0 * f + custom->fn(x - sx, y)) / (sx * sx) +
                           (custom->fn(x, y + sy) - 2.0 * f + custom->fn(x, y - sy)) / (sy * sy);
        best = std::max(best, std::abs(lap));
      }
    }
  }
  return best;
}

double disk_rectangle_area(double radius, double x0, double x1, double y0, double y1) {
  if (radius <= 0.0 || x1 <= x0 || y1 <= y0) return 0.0;
  const double r = radius;
  const double a = std::max(x0, -r);
  const double b = std::min(x1, r);
  if (b <= a) return 0.0;
  auto half_chord = [r](double x) { return std::sqrt(std::max(0.0, r * r - x * x)); };
  // antiderivative of half_chord
  auto S = [r, &half_chord](double x) {
    const double t = std::clamp(x / r, -1.0, 1.0);
    return 0.5 * (x * half_chord(x) + r * r * std::asin(t));
  };
  std::vector<double> cuts{a, b};
  for (double c : {y0, y1}) {
    if (std::abs(c) < r) {
      const double xc = std::sqrt(r * r - c * c);
      for (double x : {-xc, xc}) {
        if (x > a && x < b) cuts.push_back(x);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double xa = cuts[k];
    const double xb = cuts[k + 1];
    if (xb <= xa) continue;
    const double xm = 0.5 * (xa + xb);
    const double s = half_chord(xm);
    const bool upper_is_chord = s <= y1;
    const bool lower_is_chord = -s >= y0;
    const double upper = upper_is_chord ? s : y1;
    const double lower = lower_is_chord ? -s : y0;
    if (upper <= lower) continue;
    const double chord_part = S(xb) - S(xa);
    double piece = 0.0;
    piece += upper_is_chord ? chord_part : y1 * (xb - xa);
    piece -= lower_is_chord ? -chord_part : y0 * (xb - xa);
    area += piece;
  }
  return area;
}

}  // namespace nlskt
