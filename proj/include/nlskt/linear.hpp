#pragma once

#include <functional>
#include <span>
#include <vector>

namespace nlskt {

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct GmresResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Restarted GMRES with right preconditioning; x holds the initial guess on entry.
GmresResult gmres(const LinearMap& apply_a, const LinearMap& apply_precond, std::span<const double> b,
                  std::span<double> x, int restart, double rel_tol, int max_iterations);

// Row i: lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1], indices modulo n.
struct PeriodicTridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  std::size_t size() const { return diag.size(); }
  std::vector<double> multiply(std::span<const double> x) const;
  PeriodicTridiagonal transposed() const;
};

// Thomas elimination plus a Sherman-Morrison correction for the corners.
std::vector<double> solve_periodic_tridiagonal(const PeriodicTridiagonal& m, std::span<const double> rhs);

}  // namespace nlskt
