#pragma once

#include <functional>
#include <vector>

namespace varhurst::quad {

/// Nodes and weights of a rule on some interval.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
  /// Affine image of a rule given on [-1, 1].
  Rule mapped(double a, double b) const;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on the three-term recurrence).
Rule gauss_legendre(std::size_t n);

/// n-point Gauss-Jacobi rule on [-1, 1] for the weight (1-t)^alpha (1+t)^beta, alpha, beta > -1
/// (Golub-Welsch). The weight is *not* included in the integrand.
Rule gauss_jacobi(std::size_t n, double alpha, double beta);

/// n-point Gauss-Hermite rule for the weight exp(-t^2) on the real line.
Rule gauss_hermite(std::size_t n);

/// Cached Gauss-Legendre rule on [-1, 1]; thread-safe.
const Rule& cached_gauss_legendre(std::size_t n);

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (21-point) on [a, b]. Throws QuadratureError if the error estimate
/// exceeds max(abs_tol, rel_tol*|value|).
Estimate integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                   double rel_tol = 0.0, unsigned max_depth = 30);

/// Double-exponential (tanh-sinh) quadrature on [a, b]; tolerates integrable algebraic
/// endpoint singularities. Same error contract as integrate().
Estimate integrate_endpoint_singular(const std::function<double(double)>& f, double a, double b,
                                     double abs_tol, double rel_tol = 0.0);

}  // namespace varhurst::quad
