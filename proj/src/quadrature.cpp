#include "varhurst/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <sstream>

#include "varhurst/errors.hpp"

namespace varhurst::quad {

Rule Rule::mapped(double a, double b) const {
  Rule r;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  r.nodes.resize(nodes.size());
  r.weights.resize(weights.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    r.nodes[i] = mid + half * nodes[i];
    r.weights[i] = half * weights[i];
  }
  return r;
}

Rule gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("gauss_legendre: n must be positive");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) {
      r.nodes[0] = 0.0;
      r.weights[0] = 2.0;
      return r;
    }
    dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

Rule gauss_jacobi(std::size_t n, double alpha, double beta) {
  if (n == 0) throw DomainError("gauss_jacobi: n must be positive");
  if (!(alpha > -1.0) || !(beta > -1.0)) throw DomainError("gauss_jacobi: alpha, beta must exceed -1");
  const double ab = alpha + beta;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  diag(0) = (beta - alpha) / (ab + 2.0);
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + ab;
    diag(static_cast<Eigen::Index>(k)) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    double b;
    if (k == 1) {
      b = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      b = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    off(static_cast<Eigen::Index>(k - 1)) = std::sqrt(b);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw LinalgError("gauss_jacobi: eigensolver failed");
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    r.nodes[i] = solver.eigenvalues()(ii);
    const double v0 = solver.eigenvectors()(0, ii);
    r.weights[i] = mu0 * v0 * v0;
  }
  return r;
}

Rule gauss_hermite(std::size_t n) {
  if (n == 0) throw DomainError("gauss_hermite: n must be positive");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (std::size_t k = 1; k < n; ++k) off(static_cast<Eigen::Index>(k - 1)) = std::sqrt(0.5 * static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw LinalgError("gauss_hermite: eigensolver failed");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    r.nodes[i] = solver.eigenvalues()(ii);
    const double v0 = solver.eigenvectors()(0, ii);
    r.weights[i] = std::sqrt(std::numbers::pi) * v0 * v0;
  }
  return r;
}

const Rule& cached_gauss_legendre(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, Rule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
  return it->second;
}

namespace {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// Integrated on [0, 1]: the rule's error floor scales with the integrand, not with the panel width.
Panel kronrod_panel(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0;
  const double w = b - a;
  auto g = [&](double u) { return f(a + w * u); };
  const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(g, 0.0, 1.0, 0, 0.0, &err);
  return {a, b, v * w, err * std::abs(w)};
}

[[noreturn]] void fail(const char* who, double value, double error) {
  std::ostringstream os;
  os << who << ": no convergence (estimate " << value << ", error estimate " << error << ")";
  throw QuadratureError(os.str(), value, error);
}

}  // namespace

Estimate integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                   double rel_tol, unsigned max_depth) {
  if (a == b) return {};
  std::priority_queue<Panel> heap;
  heap.push(kronrod_panel(f, a, b));
  double value = heap.top().value;
  double error = heap.top().error;
  const std::size_t max_panels = std::size_t{1} << std::min(max_depth, 20u);
  std::size_t panels = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (panels >= max_panels) fail("quad::integrate", value, error);
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) fail("quad::integrate", value, error);
    Panel left = kronrod_panel(f, worst.a, mid);
    Panel right = kronrod_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to shed the drift of the incremental updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error};
}

Estimate integrate_endpoint_singular(const std::function<double(double)>& f, double a, double b,
                                     double abs_tol, double rel_tol) {
  if (a == b) return {};
  boost::math::quadrature::tanh_sinh<double> ts(15);
  double err = 0.0, l1 = 0.0;
  // On [0, 1] the error estimate is relative to the scale of the integrand, not of the abscissas.
  const double w = b - a;
  auto g = [&](double u) { return f(a + w * u); };
  double v = ts.integrate(g, 0.0, 1.0, 1e-11, &err, &l1);
  v *= w;
  err *= std::abs(w);
  if (!(err <= std::max(abs_tol, rel_tol * std::abs(v)))) fail("quad::integrate_endpoint_singular", v, err);
  return {v, err};
}

}  // namespace varhurst::quad
