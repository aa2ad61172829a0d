#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "nlskt/errors.hpp"
#include "nlskt/kernels.hpp"
#include "oracles.hpp"

using namespace nlskt;

TEST_CASE("indicator of two cells") {
  for (double L : {1.0, 25.0}) {
    auto g = make_periodic_1d(16, L);
    const double dx = g.dx();
    auto k = discretize(IndicatorKernel{2 * dx}, g);
    CHECK(k.value(0) == doctest::Approx(1 / (2 * dx)).epsilon(1e-12));
    CHECK(k.value(1) == doctest::Approx(1 / (4 * dx)).epsilon(1e-12));
    CHECK(k.value(-1) == doctest::Approx(1 / (4 * dx)).epsilon(1e-12));
    for (int m = 2; m < 15; ++m) CHECK(k.value(m) == doctest::Approx(0.0));
    CHECK(k.total_weight() == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("indicator convolution on N=4") {
  auto g = make_periodic_1d(4, 1.0);
  auto k = discretize(IndicatorKernel{2 * g.dx()}, g);
  auto out = k.convolve(std::vector<double>{1, 0, 0, 0});
  const std::vector<double> want{0.5, 0.25, 0.0, 0.25};
  for (int i = 0; i < 4; ++i) CHECK(out[i] == doctest::Approx(want[i]).epsilon(1e-14));
}

TEST_CASE("dirac kernel") {
  auto g = make_periodic_1d(8, 2.0);
  auto k = discretize(DiracKernel{}, g);
  CHECK(k.is_dirac());
  CHECK(k.value(0) == doctest::Approx(1 / g.dx()));
  for (int m = 1; m < 8; ++m) CHECK(k.value(m) == 0.0);
  std::vector<double> u{3, 1, 4, 1, 5, 9, 2, 6};
  CHECK(k.convolve(u) == u);
}

TEST_CASE("smooth kernel mass") {
  auto g = make_periodic_1d(64, 25.0);
  auto k = discretize(SmoothCosKernel{}, g);
  CHECK(k.total_weight() == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(k.is_even());
  CHECK(kernel_laplacian_sup(SmoothCosKernel{}, g) ==
        doctest::Approx(std::pow(2 * std::numbers::pi / 25.0, 2)).epsilon(1e-14));
}

TEST_CASE("normalized kernel preserves constants") {
  auto g = make_periodic_1d(40, 25.0);
  for (const KernelSpec& s : {KernelSpec{IndicatorKernel{6.25}}, KernelSpec{HuntingKernel{2.0}}}) {
    auto k = discretize(s, g);
    CHECK(k.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
    auto out = k.convolve(std::vector<double>(40, 2.5));
    for (double v : out) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
  }
}

TEST_CASE("fft convolution equals direct summation") {
  std::mt19937 rng(7);
  auto g1 = make_periodic_1d(37, 25.0);
  auto g2 = make_periodic_2d(12, 9, 4.0, 3.0);
  std::vector<DiscreteKernel> ks{discretize(SmoothCosKernel{}, g1), discretize(IndicatorKernel{3.0}, g1),
                                 discretize(HuntingKernel{1.5}, g1), discretize(AnnulusKernel{}, g2),
                                 discretize(AnnulusKernel{3.0 / 8.0, 0.5, true}, g2)};
  for (const auto& k : ks) {
    auto u = oracle::random_positive(rng, k.grid().size(), 0.0, 3.0);
    auto fast = k.convolve(u);
    auto ref = oracle::convolve(k, u);
    auto direct = convolve_direct(k, u);
    for (std::size_t i = 0; i < u.size(); ++i) {
      CHECK(fast[i] == doctest::Approx(ref[i]).epsilon(1e-12));
      CHECK(direct[i] == doctest::Approx(ref[i]).epsilon(1e-12));
      CHECK(fast[i] >= 0.0);
    }
  }
}

TEST_CASE("annulus kernels") {
  auto g = make_periodic_2d(40, 30, 4.0, 3.0);
  auto sym = discretize(AnnulusKernel{}, g);
  auto quad = discretize(AnnulusKernel{3.0 / 8.0, 0.5, true}, g);
  CHECK(sym.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(quad.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sym.is_even());
  CHECK_FALSE(quad.is_even());
  // the quarter disk area by exact formula
  CHECK(disk_rectangle_area(1.0, 0.0, 1.0, 0.0, 1.0) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-12));
  CHECK(disk_rectangle_area(1.0, -1.0, 1.0, -1.0, 1.0) == doctest::Approx(std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("disk rectangle area against midpoint integration") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  for (int k = 0; k < 40; ++k) {
    double x0 = d(rng), x1 = d(rng), y0 = d(rng), y1 = d(rng);
    if (x1 < x0) std::swap(x0, x1);
    if (y1 < y0) std::swap(y0, y1);
    const double r = 0.3 + 0.5 * (k % 3);
    const int n = 200000;
    double ref = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = x0 + (i + 0.5) * (x1 - x0) / n;
      const double s = std::sqrt(std::max(0.0, r * r - x * x));
      ref += std::max(0.0, std::min(y1, s) - std::max(y0, -s)) * (x1 - x0) / n;
    }
    CHECK(std::abs(disk_rectangle_area(r, x0, x1, y0, y1) - ref) < 1e-7);
  }
}

TEST_CASE("hunting kernel is even and non-smooth") {
  auto g = make_periodic_1d(500, 25.0);
  auto k = discretize(HuntingKernel{25.0 * 10.0 / 49.0}, g);
  CHECK(k.is_even());
  CHECK_THROWS_AS(kernel_laplacian_sup(HuntingKernel{1.0}, g), PreconditionError);
}

TEST_CASE("kernel errors") {
  auto g = make_periodic_1d(8, 1.0);
  CHECK_THROWS_AS(discretize(IndicatorKernel{2.0}, g), ConfigError);
  CHECK_THROWS_AS(discretize(HuntingKernel{0.5}, g), ConfigError);
  CHECK_THROWS_AS(discretize(AnnulusKernel{}, g), ConfigError);
  auto k = discretize(SmoothCosKernel{}, g);
  CHECK_THROWS_AS(k.convolve(std::vector<double>(5, 1.0)), ConfigError);
}

TEST_CASE("reflection") {
  auto g = make_periodic_2d(10, 10, 4.0, 3.0);
  auto quad = discretize(AnnulusKernel{3.0 / 8.0, 0.5, true}, g);
  auto r = quad.reflected();
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) CHECK(r.value(i, j) == quad.value(-i, -j));
}
