#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "nlskt/diagnostics.hpp"
#include "nlskt/norms.hpp"
#include "oracles.hpp"

using namespace nlskt;

namespace {

SchemeParams smooth_params(const PeriodicGrid& g, double d1 = 0.0) {
  auto k = discretize(SmoothCosKernel{}, g);
  return make_scheme_params({d1, d1, 0.0, 0.0, 1.0, 2.0}, k, k, k, k);
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("record on a constant equilibrium") {
  auto g = make_periodic_1d(16, 25.0);
  auto p = smooth_params(g);
  State s{CellField(16, 1.0), CellField(16, 2.0), 0.0};
  auto r = record(s, s, p, 0.1, StepStats{}, true);
  REQUIRE(r.entropy_balance.has_value());
  CHECK(std::abs(*r.entropy_balance) < 1e-14);
  CHECK(std::abs(*r.dissipation) < 1e-14);
  CHECK(r.mass1 == doctest::Approx(25.0).epsilon(1e-15));
  CHECK(r.mass2 == doctest::Approx(50.0).epsilon(1e-15));
  auto r2 = record(s, s, p, 0.1, StepStats{}, false);
  CHECK_FALSE(r2.dissipation.has_value());
  CHECK_FALSE(r2.entropy_balance.has_value());
  CHECK(r2.entropy.has_value());
}

TEST_CASE("record fields") {
  std::mt19937 rng(2);
  auto g = make_periodic_1d(12, 25.0);
  auto p = smooth_params(g, 0.1);
  State a{oracle::random_positive(rng, 12), oracle::random_positive(rng, 12), 0.0};
  State b{oracle::random_positive(rng, 12), oracle::random_positive(rng, 12), 0.5};
  auto r = record(a, b, p, 0.5, StepStats{}, true);
  double m1 = 0.0;
  for (double v : b.u1) m1 += g.dx() * v;
  CHECK(std::abs(r.mass1 - m1) <= 1e-15 * m1 * 4);
  const double h = oracle::entropy(b.u1, b.u2, g.dx(), 1.0, 2.0);
  const double hp = oracle::entropy(a.u1, a.u2, g.dx(), 1.0, 2.0);
  CHECK(*r.entropy == doctest::Approx(h).epsilon(1e-13));
  CHECK(*r.entropy_balance == doctest::Approx(h + 0.5 * oracle::dissipation(b.u1, b.u2, p) - hp).epsilon(1e-11));
  CHECK(r.min1 == *std::min_element(b.u1.begin(), b.u1.end()));
  CHECK(r.max2 == *std::max_element(b.u2.begin(), b.u2.end()));
}

TEST_CASE("monitor over a solved run") {
  auto g = make_periodic_1d(32, 25.0);
  auto p = smooth_params(g);
  auto s = initial_state({BoxTerm{1.0, 25.0 / 9, 25.0 / 3}}, {BoxTerm{1.0, 25.0 / 3, 75.0 / 4}}, g);
  RunMonitor mon(p, s, DiagnosticsOptions{});
  AdvanceOptions opt;
  opt.observer = mon.observer();
  auto res = adaptive_advance(s, 1.0, 0.1, p, SolverConfig{}, opt);
  REQUIRE(res.completed);
  CHECK(mon.records().size() == 10);
  CHECK(mon.mass_ok());
  CHECK(mon.entropy_checked());
  CHECK(mon.entropy_ok());
  CHECK(mon.positivity_ok());
  for (const auto& r : mon.records()) {
    REQUIRE(r.entropy_balance.has_value());
    CHECK(*r.entropy_balance <= r.epsilon_solver);
  }
  // entropy is non-increasing
  for (std::size_t k = 1; k < mon.records().size(); ++k)
    CHECK(*mon.records()[k].entropy <= *mon.records()[k - 1].entropy + mon.records()[k].epsilon_solver);
}

TEST_CASE("entropy check skipped without hypotheses") {
  auto g = make_periodic_1d(16, 25.0);
  auto k = discretize(SmoothCosKernel{}, g);
  auto p = make_scheme_params({0.05, 2.0, 0.0, 0.0, 0.0, 0.0}, k, k, k, k);
  State s{CellField(16, 1.0), CellField(16, 1.0), 0.0};
  RunMonitor mon(p, s, DiagnosticsOptions{});
  CHECK_FALSE(mon.entropy_checked());
  auto r = record(s, s, p, 0.1, StepStats{}, true);
  CHECK_FALSE(r.entropy.has_value());
}

TEST_CASE("csv writers") {
  auto dir = std::filesystem::temp_directory_path() / "nlskt_diag_test";
  std::filesystem::create_directories(dir);
  DiagnosticsRecord r;
  r.k = 3;
  r.time = 0.25;
  r.mass1 = 1.0 / 3.0;
  r.entropy = 2.0;
  {
    DiagnosticsWriter w((dir / "d.csv").string());
    w.write(r);
  }
  auto text = read_all(dir / "d.csv");
  CHECK(text.rfind("k,t,mass1,mass2,H,D,entropy_balance,min1,max1,min2,max2,newton_iters,dt\n", 0) == 0);
  // missing D is an empty field
  CHECK(text.find(",2.0000000000000000e+00,,") != std::string::npos);
  CHECK(text.find("3.3333333333333331e-01") != std::string::npos);
  CHECK(format_double(0.1) == "1.0000000000000001e-01");

  auto g = make_periodic_2d(2, 2, 1.0, 1.0);
  State s{{1, 2, 3, 4}, {5, 6, 7, 8}, 0.0};
  write_field_snapshot((dir / "f.csv").string(), s, g);
  auto f = read_all(dir / "f.csv");
  CHECK(f.rfind("x,y,u1,u2\n", 0) == 0);
  std::filesystem::remove_all(dir);
}
