#include "varhurst/covariance.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "varhurst/errors.hpp"
#include "varhurst/quadrature.hpp"

namespace varhurst {

namespace {

constexpr int kBinomTerms = 96;

// log(Gamma(2H+1) sin(pi H)), the squared normalizer up to 2 pi.
double log_normalizer_sq(double H) { return std::lgamma(2.0 * H + 1.0) + std::log(std::sin(std::numbers::pi * H)); }

}  // namespace

double C_star(double H) {
  if (!(H > 0.0 && H < 1.0)) throw DomainError("C_star: H must lie in (0, 1)");
  return std::exp(0.5 * (log_normalizer_sq(H) - std::log(2.0 * std::numbers::pi)));
}

double c_star(double H) {
  if (!(H > 0.5 && H < 1.0)) throw DomainError("c_star: H must lie in (1/2, 1)");
  const double lg = std::log(H * (2.0 * H - 1.0)) + std::lgamma(1.5 - H) - std::lgamma(2.0 - 2.0 * H) -
                    std::lgamma(H - 0.5);
  return std::exp(0.5 * lg);
}

double fbm_cov(double H, double x, double y) {
  const double e = 2.0 * H;
  return 0.5 * (std::pow(x, e) + std::pow(y, e) - std::pow(std::abs(x - y), e));
}

double mbm_cov(const HurstProfile& profile, double x, double y) {
  const double h1 = profile(x), h2 = profile(y);
  const double hb = 0.5 * (h1 + h2);
  const double logd = 0.5 * (log_normalizer_sq(h1) + log_normalizer_sq(h2)) - std::log(2.0) - log_normalizer_sq(hb);
  const double e = 2.0 * hb;
  return std::exp(logd) * (std::pow(x, e) + std::pow(y, e) - std::pow(std::abs(x - y), e));
}

VolterraKernel::VolterraKernel(double H) : H_(H), a_(H - 0.5), c_(c_star(H)), coeff_(c_ / a_) {
  binom_.resize(kBinomTerms);
  binom_[0] = 1.0;
  for (int k = 1; k < kBinomTerms; ++k) binom_[k] = binom_[k - 1] * (a_ - k + 1) / k;
  phi_half_ = 0.0;
  phi_half_ = Phi(0.5);
  phi_two_ = 0.0;
  phi_two_ = Phi(2.0);
  far_const_ = phi_two_ + std::pow(2.0, a_) / a_ - std::pow(2.0, 2.0 * a_) * large_series(0.5);
  near_ = fit([this](double s) { return small_series(s); }, 0.0, 0.5);
  mid_lo_ = fit([this](double s) { return Phi(s) * std::pow(s, -a_); }, 0.5, 1.0);
  mid_hi_ = fit([this](double s) { return Phi(s) * std::pow(s, -a_); }, 1.0, 2.0);
  far_ = fit([this](double z) { return large_series(z); }, 0.0, 0.5);
}

template <class F>
VolterraKernel::Chebyshev VolterraKernel::fit(F f, double lo, double hi) {
  Chebyshev ch;
  ch.lo = lo;
  ch.hi = hi;
  constexpr std::size_t N = std::tuple_size_v<decltype(ch.c)>;
  std::array<double, N> fx{};
  for (std::size_t j = 0; j < N; ++j) {
    const double t = std::cos(std::numbers::pi * (static_cast<double>(j) + 0.5) / N);
    fx[j] = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * t);
  }
  for (std::size_t k = 0; k < N; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < N; ++j)
      acc += fx[j] * std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(j) + 0.5) / N);
    ch.c[k] = 2.0 * acc / N;
  }
  ch.c[0] *= 0.5;
  return ch;
}

double VolterraKernel::Chebyshev::operator()(double s) const {
  const double t = (2.0 * s - lo - hi) / (hi - lo);
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size() - 1; k > 0; --k) {
    const double b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

double VolterraKernel::small_series(double s) const {
  double sum = 0.0, pw = 1.0;
  for (int k = 1; k < kBinomTerms; ++k) {
    const double term = binom_[k] * pw / (k + a_);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    pw *= s;
  }
  return sum;
}

double VolterraKernel::large_series(double z) const {
  double sum = 0.0, pw = 1.0;
  for (int k = 0; k < kBinomTerms; ++k) {
    const double term = binom_[k] * pw / (2.0 * a_ - k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    pw *= z;
  }
  return sum;
}

double VolterraKernel::Phi_scaled(double s) const {
  if (s <= 0.5) return s * near_(s);
  if (s <= 1.0) return mid_lo_(s);
  if (s <= 2.0) return mid_hi_(s);
  const double sa = std::pow(s, a_);
  return far_const_ / sa - 1.0 / a_ + sa * far_(1.0 / s);
}

double VolterraKernel::Phi(double s) const {
  if (!(s >= 0.0)) throw DomainError("mfbm_Phi: s must be nonnegative");
  if (s == 0.0) return 0.0;
  if (s <= 0.5) {
    double sum = 0.0, pw = std::pow(s, a_);
    for (int k = 1; k < kBinomTerms; ++k) {
      pw *= s;
      const double term = binom_[k] * pw / (k + a_);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  if (s <= 2.0) {
    const auto& gl = quad::cached_gauss_legendre(20);
    const double mid = 0.5 * (s + 0.5), half = 0.5 * (s - 0.5);
    double sum = 0.0;
    for (std::size_t q = 0; q < gl.size(); ++q) {
      const double w = mid + half * gl.nodes[q];
      sum += gl.weights[q] * std::pow(w, a_ - 1.0) * std::expm1(a_ * std::log1p(w));
    }
    return phi_half_ + half * sum;
  }
  // (1+w)^a = w^a (1 + 1/w)^a expanded for w > 2.
  double sum = phi_two_ - (std::pow(s, a_) - std::pow(2.0, a_)) / a_;
  double ps = std::pow(s, 2.0 * a_), p2 = std::pow(2.0, 2.0 * a_);
  for (int k = 0; k < kBinomTerms; ++k) {
    const double term = binom_[k] * (ps - p2) / (2.0 * a_ - k);
    sum += term;
    if (std::abs(binom_[k] * p2) < 1e-18 * std::abs(sum)) break;
    ps /= s;
    p2 *= 0.5;
  }
  return sum;
}

double VolterraKernel::regular_part(double x, double y) const {
  const double d = x - y;
  if (d <= 0.0) return coeff_;
  return coeff_ + c_ * Phi_scaled(d / y);
}

double VolterraKernel::operator()(double x, double y) const {
  if (!(y > 0.0 && y < x)) return 0.0;
  return std::pow(x - y, a_) * regular_part(x, y);
}

double mfbm_Phi(double s, double H) { return VolterraKernel(H).Phi(s); }

double mfbm_K(double x, double y, double H) { return VolterraKernel(H)(x, y); }

namespace {

double mfbm_cov_with(const VolterraKernel& kx, const VolterraKernel& ky, double x, double y, double tol) {
  // Order the pair so that the result is symmetric bit for bit.
  const bool swap = x < y || (x == y && kx.H() < ky.H());
  const VolterraKernel& k1 = swap ? ky : kx;
  const VolterraKernel& k2 = swap ? kx : ky;
  const double x1 = swap ? y : x, x2 = swap ? x : y;
  if (x2 <= 0.0) return 0.0;
  auto f = [&](double u) { return k1(x1, u) * k2(x2, u); };
  return quad::integrate_endpoint_singular(f, 0.0, x2, tol, 1e-10).value;
}

}  // namespace

double mfbm_cov(const HurstProfile& profile, double x, double y, double tol) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) throw DomainError("mfbm_cov: x, y must lie in [0, 1]");
  if (x == 0.0 || y == 0.0) return 0.0;
  return mfbm_cov_with(VolterraKernel(profile(x)), VolterraKernel(profile(y)), x, y, tol);
}

const char* process_name(Process p) {
  switch (p) {
    case Process::FBM: return "fbm";
    case Process::MBM: return "mbm";
    case Process::MFBM: return "mfbm";
  }
  return "unknown";
}

CovarianceSpec CovarianceSpec::fbm(double H) {
  if (!(H > 0.0 && H < 1.0)) throw DomainError("fbm: H must lie in (0, 1)");
  return CovarianceSpec(Process::FBM, HurstProfile::constant(H));
}

CovarianceSpec CovarianceSpec::mbm(const HurstProfile& profile) {
  profile.require_range(0.0, "mbm");
  return CovarianceSpec(Process::MBM, profile);
}

CovarianceSpec CovarianceSpec::mfbm(const HurstProfile& profile) {
  profile.require_range(0.5, "mfbm");
  return CovarianceSpec(Process::MFBM, profile);
}

CovarianceSpec& CovarianceSpec::with_tolerance(double tol) {
  if (!(tol > 0.0)) throw DomainError("covariance: quadrature tolerance must be positive");
  tol_ = tol;
  return *this;
}

double CovarianceSpec::operator()(double x, double y) const {
  switch (process_) {
    case Process::FBM: return fbm_cov(profile_.base(), x, y);
    case Process::MBM: return mbm_cov(profile_, x, y);
    case Process::MFBM: return mfbm_cov(profile_, x, y, tol_);
  }
  return 0.0;
}

namespace {

// Panels [0, x_0], [x_0, x_1], ...; the covariance of rows i <= j integrates over panels 0..i.
// Panels strictly below x_i carry smooth integrands and enter through one symmetric rank update;
// panel i carries the (x_i - u)^a endpoint factor and gets a Gauss-Jacobi rule.
Eigen::MatrixXd mfbm_gram(const HurstProfile& profile, const std::vector<double>& x, double tol) {
  const auto n = static_cast<Eigen::Index>(x.size());
  std::vector<VolterraKernel> kern;
  kern.reserve(x.size());
  double a_max = 0.0;
  for (double xi : x) {
    kern.emplace_back(profile(xi));
    a_max = std::max(a_max, kern.back().H() - 0.5);
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);

  // Regular nodes, panel by panel.
  constexpr std::size_t kPanelNodes = 10, kOriginNodes = 24;
  const auto& gl = quad::cached_gauss_legendre(kPanelNodes);
  const auto& gl0 = quad::cached_gauss_legendre(kOriginNodes);
  // u = (x_0/2) v^p flattens the u^{-2a} blow-up at the origin.
  const double p = std::max(1.0, 4.0 / (1.0 - 2.0 * a_max));
  std::vector<std::vector<std::pair<double, double>>> panels(x.size());
  {
    const double half = 0.5 * x[0];
    for (std::size_t q = 0; q < gl0.size(); ++q) {
      const double v = 0.5 * (gl0.nodes[q] + 1.0);
      const double w = 0.5 * gl0.weights[q];
      panels[0].emplace_back(half * std::pow(v, p), half * p * std::pow(v, p - 1.0) * w);
    }
    for (std::size_t q = 0; q < gl.size(); ++q)
      panels[0].emplace_back(half + 0.5 * half * (gl.nodes[q] + 1.0), 0.5 * half * gl.weights[q]);
  }
  for (std::size_t k = 1; k < x.size(); ++k) {
    const double mid = 0.5 * (x[k] + x[k - 1]), half = 0.5 * (x[k] - x[k - 1]);
    for (std::size_t q = 0; q < gl.size(); ++q) panels[k].emplace_back(mid + half * gl.nodes[q], half * gl.weights[q]);
  }

  constexpr std::size_t kBlock = 64;
  for (std::size_t k0 = 0; k0 + 1 < x.size(); k0 += kBlock) {
    const std::size_t k1 = std::min(k0 + kBlock, x.size() - 1);
    std::size_t cols = 0;
    for (std::size_t k = k0; k < k1; ++k) cols += panels[k].size();
    const auto r0 = static_cast<Eigen::Index>(k0 + 1);
    const Eigen::Index rows = n - r0;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(cols));
    Eigen::Index c = 0;
    for (std::size_t k = k0; k < k1; ++k) {
      for (const auto& [u, w] : panels[k]) {
        const double sw = std::sqrt(w);
        for (Eigen::Index i = static_cast<Eigen::Index>(k) + 1; i < n; ++i)
          A(i - r0, c) = sw * kern[static_cast<std::size_t>(i)](x[static_cast<std::size_t>(i)], u);
        ++c;
      }
    }
    cblas_dsyrk(CblasColMajor, CblasLower, CblasNoTrans, static_cast<int>(rows), static_cast<int>(cols), 1.0,
                A.data(), static_cast<int>(rows), 1.0, G.data() + r0 * n + r0, static_cast<int>(n));
  }

  // Last panel of each row.
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double a = kern[i].H() - 0.5;
    const double mid = 0.5 * (x[i] + x[i - 1]), half = 0.5 * (x[i] - x[i - 1]);
    const quad::Rule cross = quad::gauss_jacobi(kPanelNodes, a, 0.0);
    const quad::Rule diag = quad::gauss_jacobi(kPanelNodes, 2.0 * a, 0.0);
    const double fc = std::pow(half, a + 1.0), fd = std::pow(half, 2.0 * a + 1.0);
    double dsum = 0.0;
    for (std::size_t q = 0; q < diag.size(); ++q) {
      const double g = kern[i].regular_part(x[i], mid + half * diag.nodes[q]);
      dsum += diag.weights[q] * g * g;
    }
    G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += fd * dsum;
    std::vector<double> u(cross.size()), gw(cross.size());
    for (std::size_t q = 0; q < cross.size(); ++q) {
      u[q] = mid + half * cross.nodes[q];
      gw[q] = fc * cross.weights[q] * kern[i].regular_part(x[i], u[q]);
    }
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      double s = 0.0;
      for (std::size_t q = 0; q < u.size(); ++q) s += gw[q] * kern[j](x[j], u[q]);
      G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) += s;
    }
  }

  // The first node has both endpoint singularities in one panel; integrate it directly.
  for (Eigen::Index j = 0; j < n; ++j)
    G(j, 0) = mfbm_cov_with(kern[static_cast<std::size_t>(j)], kern[0], x[static_cast<std::size_t>(j)], x[0], tol);

  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  return G;
}

}  // namespace

Eigen::MatrixXd covariance_gram(const CovarianceSpec& spec, const std::vector<double>& nodes) {
  if (nodes.empty()) throw DomainError("covariance_gram: no nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(nodes[i] > 0.0 && nodes[i] <= 1.0) || (i > 0 && !(nodes[i] > nodes[i - 1])))
      throw DomainError("covariance_gram: nodes must be strictly increasing in (0, 1]");
  }
  if (spec.process() == Process::MFBM) return mfbm_gram(spec.profile(), nodes, spec.quadrature_tolerance());
  const auto n = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double v = spec(nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(j)]);
      G(i, j) = v;
      G(j, i) = v;
    }
  }
  return G;
}

}  // namespace varhurst
