#include "doctest.h"

#include <cmath>

#include "nlskt/errors.hpp"
#include "nlskt/grid.hpp"

using namespace nlskt;

TEST_CASE("grid spacing") {
  CHECK(make_periodic_1d(4, 1.0).dx() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(make_periodic_1d(500, 25.0).dx() == doctest::Approx(0.05).epsilon(1e-15));
  CHECK_THROWS_AS(make_periodic_1d(1, 1.0), ConfigError);
  CHECK_THROWS_AS(make_periodic_1d(8, -1.0), ConfigError);
  CHECK_THROWS_AS(make_periodic_1d(8, std::nan("")), ConfigError);
}

TEST_CASE("2d grid indexing wraps") {
  auto g = make_periodic_2d(4, 3, 4.0, 3.0);
  CHECK(g.size() == 12);
  CHECK(g.index(0, 0) == 0);
  CHECK(g.index(-1, 0) == 3);
  CHECK(g.index(0, -1) == 8);
  CHECK(g.index(5, 4) == 1 + 4);
  CHECK(g.neighbor(g.index(3, 2), 0, 1) == g.index(0, 2));
  CHECK(g.neighbor(g.index(3, 2), 1, 1) == g.index(3, 0));
  CHECK(g.cell_volume() == doctest::Approx(1.0));
  CHECK_THROWS_AS(make_periodic_2d(1, 4, 1.0, 1.0), ConfigError);
}

TEST_CASE("projection to coarser grid") {
  auto coarse = make_periodic_1d(2, 1.0);
  auto a = project_to_coarser(std::vector<double>{1, 1, 3, 3}, coarse);
  CHECK(a == std::vector<double>{1, 3});
  auto b = project_to_coarser(std::vector<double>{0, 4, 0, 0}, coarse);
  CHECK(b == std::vector<double>{2, 0});
  CHECK_THROWS_AS(project_to_coarser(std::vector<double>{1, 2, 3}, coarse), ConfigError);
}

TEST_CASE("bounded grid and time grid") {
  BoundedGrid1D b(8);
  CHECK(b.dx() == doctest::Approx(0.125));
  CHECK(b.interface_position(8) == doctest::Approx(1.0));
  CHECK(b.center(0) == doctest::Approx(0.0625));
  CHECK_THROWS_AS(BoundedGrid1D(1), ConfigError);
  auto t = make_time_grid(5.0, 4);
  CHECK(t.dt == doctest::Approx(1.25));
  CHECK_THROWS_AS(make_time_grid(0.0, 4), ConfigError);
}
