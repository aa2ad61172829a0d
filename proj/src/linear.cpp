#include "nlskt/linear.hpp"

#include <cmath>

#include "nlskt/errors.hpp"

namespace nlskt {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Non-periodic tridiagonal solve; a[0] and c[n-1] are ignored.
std::vector<double> thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c, std::vector<double> d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (b[i - 1] == 0.0) throw SolverFailure("zero pivot in tridiagonal elimination");
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  if (b[n - 1] == 0.0) throw SolverFailure("zero pivot in tridiagonal elimination");
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

}  // namespace

GmresResult gmres(const LinearMap& apply_a, const LinearMap& apply_precond, std::span<const double> b,
                  std::span<double> x, int restart, double rel_tol, int max_iterations) {
  const std::size_t n = b.size();
  const int m = std::max(1, restart);
  GmresResult res;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  std::vector<std::vector<double>> V(static_cast<std::size_t>(m + 1), std::vector<double>(n));
  std::vector<std::vector<double>> H(static_cast<std::size_t>(m + 1), std::vector<double>(static_cast<std::size_t>(m), 0.0));
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m)), g(static_cast<std::size_t>(m + 1));
  std::vector<double> w(n), z(n), r(n);
  while (true) {
    apply_a(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    double beta = norm2(r);
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= rel_tol) {
      res.converged = true;
      return res;
    }
    if (res.iterations >= max_iterations) return res;
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m && res.iterations < max_iterations; ++k) {
      ++res.iterations;
      apply_precond(V[k], z);
      apply_a(z, w);
      for (int j = 0; j <= k; ++j) {
        H[j][k] = dot(w, V[j]);
        for (std::size_t i = 0; i < n; ++i) w[i] -= H[j][k] * V[j][i];
      }
      H[k + 1][k] = norm2(w);
      if (H[k + 1][k] > 0.0) {
        for (std::size_t i = 0; i < n; ++i) V[k + 1][i] = w[i] / H[k + 1][k];
      }
      for (int j = 0; j < k; ++j) {
        const double t = cs[j] * H[j][k] + sn[j] * H[j + 1][k];
        H[j + 1][k] = -sn[j] * H[j][k] + cs[j] * H[j + 1][k];
        H[j][k] = t;
      }
      const double den = std::hypot(H[k][k], H[k + 1][k]);
      cs[k] = den == 0.0 ? 1.0 : H[k][k] / den;
      sn[k] = den == 0.0 ? 0.0 : H[k + 1][k] / den;
      H[k][k] = den;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) / bnorm <= rel_tol || den == 0.0) {
        ++k;
        break;
      }
    }
    // back substitution for y, then x += M^{-1} V y
    std::vector<double> y(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
      y[i] = H[i][i] == 0.0 ? 0.0 : s / H[i][i];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < n; ++i) w[i] += y[j] * V[j][i];
    }
    apply_precond(w, z);
    for (std::size_t i = 0; i < n; ++i) x[i] += z[i];
  }
}

std::vector<double> PeriodicTridiagonal::multiply(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = diag[i] * x[i] + lower[i] * x[(i + n - 1) % n] + upper[i] * x[(i + 1) % n];
  }
  return y;
}

PeriodicTridiagonal PeriodicTridiagonal::transposed() const {
  const std::size_t n = size();
  PeriodicTridiagonal t{std::vector<double>(n), diag, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    // (M^T)_{i,i-1} = M_{i-1,i} = upper[i-1]; (M^T)_{i,i+1} = M_{i+1,i} = lower[i+1]
    t.lower[i] = upper[(i + n - 1) % n];
    t.upper[i] = lower[(i + 1) % n];
  }
  return t;
}

std::vector<double> solve_periodic_tridiagonal(const PeriodicTridiagonal& m, std::span<const double> rhs) {
  const std::size_t n = m.size();
  if (m.lower.size() != n || m.upper.size() != n || rhs.size() != n) {
    throw ConfigError("periodic tridiagonal system has inconsistent sizes");
  }
  if (n == 1) return {rhs[0] / (m.diag[0] + m.lower[0] + m.upper[0])};
  if (n == 2) {
    // both off-diagonal couplings land on the same entry
    const double a = m.diag[0], b = m.lower[0] + m.upper[0];
    const double c = m.lower[1] + m.upper[1], d = m.diag[1];
    const double det = a * d - b * c;
    if (det == 0.0) throw SolverFailure("singular 2x2 periodic system");
    return {(d * rhs[0] - b * rhs[1]) / det, (a * rhs[1] - c * rhs[0]) / det};
  }
  // M = T + u v^T, u = (gam, 0, .., 0, alpha), v = (1, 0, .., 0, beta/gam)
  const double gam = -m.diag[0];
  const double alpha = m.upper[n - 1];  // M_{n-1,0}
  const double beta = m.lower[0];       // M_{0,n-1}
  std::vector<double> a(m.lower), b(m.diag), c(m.upper);
  b[0] -= gam;
  b[n - 1] -= alpha * beta / gam;
  std::vector<double> d(rhs.begin(), rhs.end());
  const std::vector<double> y = thomas(a, b, c, d);
  std::vector<double> u(n, 0.0);
  u[0] = gam;
  u[n - 1] = alpha;
  const std::vector<double> q = thomas(a, b, c, u);
  const double vy = y[0] + beta / gam * y[n - 1];
  const double vq = q[0] + beta / gam * q[n - 1];
  const double f = vy / (1.0 + vq);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - f * q[i];
  return x;
}

}  // namespace nlskt
