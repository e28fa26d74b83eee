#pragma once

// Independent reference computations used only by the tests.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "varhurst/hurst.hpp"

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

/// Phi(s) = int_0^s w^{a-1} ((1+w)^a - 1) dw by tanh-sinh, a = H - 1/2.
inline double phi(double s, double H) {
  const double a = H - 0.5;
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [a](double w) { return w > 0.0 ? std::pow(w, a - 1.0) * std::expm1(a * std::log1p(w)) : 0.0; };
  return ts.integrate(f, 0.0, s, 1e-14);
}

inline double c_star(double H) {
  return std::sqrt(H * (2.0 * H - 1.0) * std::tgamma(1.5 - H) / (std::tgamma(2.0 - 2.0 * H) * std::tgamma(H - 0.5)));
}

/// Volterra kernel c [ (x-y)^a / a + y^a Phi((x-y)/y) ] for 0 < y < x.
inline double kernel(double x, double y, double H) {
  const double a = H - 0.5;
  if (!(y > 0.0 && y < x)) return 0.0;
  return c_star(H) * (std::pow(x - y, a) / a + std::pow(y, a) * phi((x - y) / y, H));
}

/// Multifractional covariance int_0^{min(x,y)} K_{H(x)}(x,u) K_{H(y)}(y,u) du.
inline double mfbm_cov(const varhurst::HurstProfile& p, double x, double y) {
  const double hx = p(x), hy = p(y);
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double u) { return u > 0.0 ? kernel(x, u, hx) * kernel(y, u, hy) : 0.0; };
  return ts.integrate(f, 0.0, std::min(x, y), 1e-10);
}

/// int_0^inf (1 - cos(a xi)) xi^{-1-2h} d xi: direct quadrature on [0, 1/a], and the oscillatory
/// tail rotated onto the steepest-descent path xi = T + i s.
inline double one_minus_cos_integral(double a, double h) {
  if (a == 0.0) return 0.0;
  a = std::abs(a);
  const double T = 1.0 / a;
  auto head_f = [a, h](double xi) {
    if (!(xi > 0.0)) return 0.0;
    const double q = std::sin(0.5 * a * xi) / xi;
    return 2.0 * q * q * std::pow(xi, 1.0 - 2.0 * h);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double head = ts.integrate(head_f, 0.0, T, 1e-14);
  using C = std::complex<double>;
  auto path = [a, h, T](double s, bool real_part) {
    const C v = std::exp(-a * s) * std::pow(C(T, s), -1.0 - 2.0 * h);
    return real_part ? v.real() : v.imag();
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inf = std::numeric_limits<double>::infinity();
  const C I(GK::integrate([&](double s) { return path(s, true); }, 0.0, inf, 15, 1e-14),
            GK::integrate([&](double s) { return path(s, false); }, 0.0, inf, 15, 1e-14));
  const double tail_cos = (C(0.0, 1.0) * std::exp(C(0.0, a * T)) * I).real();
  return head + std::pow(T, -2.0 * h) / (2.0 * h) - tail_cos;
}

/// Harmonizable covariance as an oscillatory frequency integral.
inline double mbm_cov(const varhurst::HurstProfile& p, double x, double y) {
  const double hx = p(x), hy = p(y), hb = 0.5 * (hx + hy);
  auto cs = [](double h) { return std::sqrt(std::tgamma(2.0 * h + 1.0) * std::sin(kPi * h) / (2.0 * kPi)); };
  // Re (e^{ix xi}-1)(e^{-iy xi}-1) = (1-cos x xi) + (1-cos y xi) - (1-cos (x-y) xi).
  const double I = one_minus_cos_integral(x, hb) + one_minus_cos_integral(y, hb) - one_minus_cos_integral(x - y, hb);
  return cs(hx) * cs(hy) * 2.0 * I;
}

/// Midpoint Riemann sum of t^{1/(base + H(x) - H_min)} over [0, 1].
inline double counting_riemann(const varhurst::HurstProfile& p, double h_min, double base, double t, std::size_t n) {
  const double lt = std::log(t);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    s += std::exp(lt / (base + p(x) - h_min));
  }
  return s / static_cast<double>(n);
}

/// meas{0 < H - H_min < s} by counting midpoints of an n-cell grid.
inline double level_measure_grid(const varhurst::HurstProfile& p, double h_min, double s, std::size_t n) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = p((static_cast<double>(i) + 0.5) / static_cast<double>(n)) - h_min;
    if (d > 0.0 && d < s) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

/// P(int_0^1 W^2 <= x) = sqrt(2) sum_n binom(-1/2, n) erfc((4n+1) / (2 sqrt(2x))).
inline double wiener_l2_cdf(double x) {
  double s = 0.0, c = 1.0;
  for (int n = 0; n < 80; ++n) {
    s += c * std::erfc((4.0 * n + 1.0) / (2.0 * std::sqrt(2.0 * x)));
    c *= -(2.0 * n + 1.0) / (2.0 * n + 2.0);
  }
  return std::sqrt(2.0) * s;
}

/// log cosh(w) for Re w >= 0.
inline std::complex<double> log_cosh(std::complex<double> w) {
  return w + std::log(0.5 * (1.0 + std::exp(-2.0 * w)));
}

/// log P(||W||_{L2(0,1)} <= eps) by inverting E exp(-z ||W||^2) = cosh(sqrt(2z))^{-1/2} along a vertical line.
inline double wiener_log_p(double eps) {
  const double r = eps * eps;
  // Saddle point of c r - log cosh(sqrt(2c)) / 2.
  auto dlog = [r](double c) {
    const double q = std::sqrt(2.0 * c);
    return r - std::tanh(q) / (2.0 * q);
  };
  boost::uintmax_t iters = 200;
  const auto br = boost::math::tools::bisect(dlog, 1e-8, 1e12, boost::math::tools::eps_tolerance<double>(50), iters);
  const double c = 0.5 * (br.first + br.second);
  const std::complex<double> z0(c, 0.0);
  const double log_m0 = -0.5 * log_cosh(std::sqrt(2.0 * z0)).real();
  auto f = [&](double u) {
    const std::complex<double> z(c, u);
    const std::complex<double> e = z * r - 0.5 * log_cosh(std::sqrt(2.0 * z)) - (c * r + log_m0);
    return (std::exp(e) / z).real();
  };
  // |M| decays like exp(-sqrt(u)/2); integrate panel by panel until negligible.
  double J = 0.0, a = 0.0, w = 0.25 * c;
  for (int k = 0; k < 100000; ++k) {
    const double piece = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, a + w, 20, 1e-13);
    J += piece;
    a += w;
    if (std::abs(f(a)) * a < 1e-17 * std::abs(J)) break;
    w = std::min(1.1 * w, kPi / r);
  }
  return c * r + log_m0 + std::log(J / kPi);
}

/// Richardson extrapolation of values at step h and h/2 for an error of order h^p.
inline double richardson(double coarse, double fine, double p) {
  const double f = std::pow(2.0, p);
  return (f * fine - coarse) / (f - 1.0);
}

}  // namespace oracle
