#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "nlskt/errors.hpp"
#include "nlskt/kolmogorov.hpp"
#include "nlskt/linear.hpp"
#include "oracles.hpp"

using namespace nlskt;

namespace {

Eigen::VectorXd vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

KolmogorovProblem smooth_problem(int n, int steps, double t_final) {
  KolmogorovProblem p;
  p.grid = make_periodic_1d(n, 1.0);
  p.dt = t_final / steps;
  for (int k = 1; k <= steps; ++k) {
    CellField mu(n);
    for (int i = 0; i < n; ++i) {
      const double x = p.grid.center_x(i);
      mu[i] = 1.0 + 0.5 * std::sin(2 * std::numbers::pi * (x - 0.1 * k * p.dt));
    }
    p.mu.push_back(mu);
  }
  p.z0.resize(n);
  for (int i = 0; i < n; ++i) p.z0[i] = 1.5 + std::cos(2 * std::numbers::pi * p.grid.center_x(i));
  return p;
}

}  // namespace

TEST_CASE("m matrix entries") {
  auto g = make_periodic_1d(4, 4.0);
  auto m = assemble_m_matrix(std::vector<double>(4, 1.0), 1.0, g);
  for (int i = 0; i < 4; ++i) {
    CHECK(m.diag[i] == 3.0);
    CHECK(m.lower[i] == -1.0);
    CHECK(m.upper[i] == -1.0);
  }
  auto id = assemble_m_matrix(std::vector<double>(4, 0.0), 1.0, g);
  for (int i = 0; i < 4; ++i) {
    CHECK(id.diag[i] == 1.0);
    CHECK(id.lower[i] == 0.0);
  }
  std::mt19937 rng(1);
  auto mu = oracle::random_positive(rng, 7, 0.0, 2.0);
  auto g7 = make_periodic_1d(7, 1.0);
  auto t = assemble_m_matrix(mu, 0.01, g7);
  Eigen::MatrixXd D = oracle::m_matrix(mu, 0.01, g7.dx());
  auto x = oracle::random_positive(rng, 7, -1.0, 1.0);
  auto y = t.multiply(x);
  Eigen::VectorXd yr = D * vec(x);
  for (int i = 0; i < 7; ++i) CHECK(y[i] == doctest::Approx(yr[i]).epsilon(1e-14));
  // columns sum to one
  for (int j = 0; j < 7; ++j) CHECK(D.col(j).sum() == doctest::Approx(1.0).epsilon(1e-14));
  // <M z, v> = <z, M^T v>
  auto v = oracle::random_positive(rng, 7, -1.0, 1.0);
  auto mz = t.multiply(x), mtv = t.transposed().multiply(v);
  double a = 0, b = 0;
  for (int i = 0; i < 7; ++i) {
    a += mz[i] * v[i];
    b += x[i] * mtv[i];
  }
  CHECK(a == doctest::Approx(b).epsilon(1e-13));
}

TEST_CASE("periodic tridiagonal solve matches dense") {
  std::mt19937 rng(5);
  for (int n : {3, 4, 8, 33, 64}) {
    auto g = make_periodic_1d(n, 1.0);
    auto mu = oracle::random_positive(rng, n, 0.0, 3.0);
    auto m = assemble_m_matrix(mu, 0.05, g);
    auto rhs = oracle::random_positive(rng, n, -1.0, 1.0);
    auto x = solve_periodic_tridiagonal(m, rhs);
    Eigen::VectorXd ref = oracle::m_matrix(mu, 0.05, g.dx()).fullPivLu().solve(vec(rhs));
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("forward step") {
  std::mt19937 rng(7);
  auto g = make_periodic_1d(8, 1.0);
  auto z = oracle::random_positive(rng, 8, 0.0, 1.0);
  CHECK(forward_step(z, std::vector<double>(8, 0.0), 0.1, g) == z);
  for (int rep = 0; rep < 5; ++rep) {
    auto mu = oracle::random_positive(rng, 8, 0.0, 2.0);
    auto zk = forward_step(z, mu, 0.1, g);
    Eigen::VectorXd ref = oracle::m_matrix(mu, 0.1, g.dx()).fullPivLu().solve(vec(z));
    double sz = 0, sk = 0;
    for (int i = 0; i < 8; ++i) {
      CHECK(zk[i] == doctest::Approx(ref[i]).epsilon(1e-12).scale(1.0));
      CHECK(zk[i] >= 0.0);
      sz += z[i];
      sk += zk[i];
    }
    CHECK(sk == doctest::Approx(sz).epsilon(1e-13));
    // monotone in the data
    auto w = z;
    for (auto& x : w) x -= 0.05;
    auto wk = forward_step(w, mu, 0.1, g);
    for (int i = 0; i < 8; ++i) CHECK(wk[i] <= zk[i] + 1e-15);
  }
}

TEST_CASE("linf bounds") {
  auto p = smooth_problem(64, 20, 0.02);
  auto rep = linf_bounds_check(p, 0.5, 2.5);
  REQUIRE(rep.applicable);
  CHECK(rep.all_pass);
  CHECK(rep.lower[0] == 0.5);
  CHECK(rep.upper[0] == 2.5);
  KolmogorovProblem c = p;
  for (auto& m : c.mu) std::fill(m.begin(), m.end(), 0.7);
  auto rc = linf_bounds_check(c, 0.5, 2.5);
  for (std::size_t k = 0; k < rc.lower.size(); ++k) {
    CHECK(rc.lower[k] == doctest::Approx(0.5));
    CHECK(rc.upper[k] == doctest::Approx(2.5));
  }
  CHECK(rc.all_pass);
}

TEST_CASE("energy estimate") {
  auto p = smooth_problem(32, 10, 0.01);
  auto rep = energy_estimate_check(p);
  CHECK(rep.applicable);
  CHECK(rep.all_pass);
  KolmogorovProblem z = p;
  for (auto& m : z.mu) std::fill(m.begin(), m.end(), 0.0);
  auto rz = energy_estimate_check(z);
  for (std::size_t k = 0; k < rz.lhs.size(); ++k) {
    CHECK(rz.lhs[k] == doctest::Approx(rz.rhs[k]).epsilon(1e-14));
  }
  KolmogorovProblem c = p;
  for (auto& m : c.mu) std::fill(m.begin(), m.end(), 1.3);
  auto rc = energy_estimate_check(c);
  const double n0 = [&] {
    double s = 0;
    for (double v : c.z0) s += c.grid.dx() * v * v;
    return s;
  }();
  for (std::size_t k = 0; k < rc.lhs.size(); ++k) {
    CHECK(rc.rhs[k] == doctest::Approx(n0).epsilon(1e-14));
    CHECK(rc.lhs[k] <= rc.rhs[k] * (1 + 1e-13));
  }
}

TEST_CASE("dual solve") {
  std::mt19937 rng(13);
  KolmogorovProblem p;
  p.grid = make_periodic_1d(8, 1.0);
  p.dt = 0.05;
  p.z0 = CellField(8, 1.0);
  for (int k = 0; k < 4; ++k) p.mu.push_back(oracle::random_positive(rng, 8, 0.2, 2.0));
  DualProblem zero{std::vector<CellField>(4, CellField(8, 0.0))};
  for (const auto& v : dual_solve(p, zero))
    for (double x : v) CHECK(x == 0.0);
  DualProblem d;
  for (int k = 0; k < 4; ++k) d.sources.push_back(oracle::random_positive(rng, 8, -1.0, 1.0));
  auto v = dual_solve(p, d);
  Eigen::VectorXd next = Eigen::VectorXd::Zero(8);
  for (int k = 3; k >= 0; --k) {
    Eigen::MatrixXd M = oracle::m_matrix(p.mu[k], p.dt, p.grid.dx());
    Eigen::VectorXd vk = M.transpose().fullPivLu().solve(next + p.dt * vec(d.sources[k]));
    for (int i = 0; i < 8; ++i) CHECK(v[k][i] == doctest::Approx(vk[i]).epsilon(1e-12).scale(1.0));
    next = vk;
  }
  auto rep = dual_estimate_check(p, d);
  CHECK(rep.all_pass);
  DualProblem short_d{std::vector<CellField>(3, CellField(8, 0.0))};
  CHECK_THROWS_AS(dual_solve(p, short_d), ConfigError);
}

TEST_CASE("duality inequality") {
  KolmogorovProblem p;
  p.grid = make_periodic_1d(10, 2.0);
  p.dt = 0.1;
  p.mu.assign(5, CellField(10, 1.0));
  p.z0 = CellField(10, 0.0);
  CHECK(duality_inequality_check(p).lhs == 0.0);
  p.z0 = CellField(10, 1.0);
  auto r = duality_inequality_check(p);
  CHECK(r.lhs == doctest::Approx(std::sqrt(0.5 * 2.0)).epsilon(1e-13));
  p.mu[2][3] = 0.0;
  CHECK_THROWS_AS(duality_inequality_check(p), PreconditionError);
}

TEST_CASE("discrete gronwall") {
  auto b = discrete_gronwall(2.0, std::vector<double>(5, 0.0), 0.1);
  for (double x : b) CHECK(x == 2.0);
  auto c = discrete_gronwall(1.0, std::vector<double>{1.0, 1.0}, 0.5);
  CHECK(c.back() == doctest::Approx(4.0));
  CHECK_THROWS_AS(discrete_gronwall(1.0, std::vector<double>{3.0}, 0.5), PreconditionError);
  CHECK_THROWS_AS(discrete_gronwall(1.0, std::vector<double>{-1.0}, 0.5), PreconditionError);
}
