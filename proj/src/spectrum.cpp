#include "varhurst/spectrum.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "varhurst/errors.hpp"
#include "varhurst/quadrature.hpp"

namespace varhurst {

namespace {

// Sorted descending, with numerical zeros (below n * eps * largest) removed.
std::vector<double> clean_descending(std::vector<double> v, std::size_t n) {
  std::sort(v.begin(), v.end(), std::greater<>());
  if (v.empty()) return v;
  const double floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * std::abs(v.front());
  auto it = std::find_if(v.begin(), v.end(), [&](double x) { return !(x > floor); });
  v.erase(it, v.end());
  return v;
}

std::vector<double> singular_values(Eigen::MatrixXd& a) {
  const auto m = static_cast<lapack_int>(a.rows()), n = static_cast<lapack_int>(a.cols());
  std::vector<double> s(static_cast<std::size_t>(std::min(m, n)));
  const lapack_int info =
      LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m, s.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw LinalgError("singular value decomposition failed (info " + std::to_string(info) + ")");
  return s;
}

constexpr double kGradingMargin = 1.25;

// n cells on [0, 1]: n0 of them graded as y0 (j/n0)^q on [0, y0], the rest uniform, with
// matching widths at y0.
std::vector<double> graded_edges(std::size_t n, double q) {
  std::vector<double> e(n + 1);
  constexpr double y0 = 0.05;
  std::size_t n0 = 0;
  if (q > 1.0) {
    n0 = static_cast<std::size_t>(std::lround(static_cast<double>(n) * q * y0 / (1.0 - y0 + q * y0)));
    n0 = std::clamp<std::size_t>(n0, 1, n - 1);
  }
  if (n0 == 0) {
    for (std::size_t j = 0; j <= n; ++j) e[j] = static_cast<double>(j) / static_cast<double>(n);
    return e;
  }
  for (std::size_t j = 0; j <= n0; ++j) e[j] = y0 * std::pow(static_cast<double>(j) / static_cast<double>(n0), q);
  for (std::size_t j = n0; j <= n; ++j)
    e[j] = y0 + (1.0 - y0) * static_cast<double>(j - n0) / static_cast<double>(n - n0);
  e[n] = 1.0;
  return e;
}

}  // namespace

const char* method_name(SpectrumMethod m) {
  switch (m) {
    case SpectrumMethod::NystromEig: return "nystrom";
    case SpectrumMethod::VolterraSVD: return "volterra";
    case SpectrumMethod::PsidoSVD: return "psido";
  }
  return "unknown";
}

std::vector<double> Spectrum::eigenvalues() const {
  std::vector<double> out(singular_values.size());
  std::transform(singular_values.begin(), singular_values.end(), out.begin(), [](double s) { return s * s; });
  return out;
}

double Spectrum::max_admissible_t() const {
  if (trusted_count == 0) return 0.0;
  return 1.0 / singular_values[trusted_count - 1];
}

void node_rule(NodeRule rule, std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n == 0) throw DomainError("node_rule: n must be positive");
  nodes.resize(n);
  weights.resize(n);
  if (rule == NodeRule::Midpoint) {
    for (std::size_t i = 0; i < n; ++i) {
      nodes[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      weights[i] = 1.0 / static_cast<double>(n);
    }
    return;
  }
  const quad::Rule r = quad::gauss_legendre(n).mapped(0.0, 1.0);
  nodes = r.nodes;
  weights = r.weights;
}

KernelMatrix build_covariance_matrix(const CovarianceSpec& spec, std::size_t n, NodeRule rule) {
  if (n < 16) throw DomainError("build_covariance_matrix: n must be at least 16");
  KernelMatrix km;
  node_rule(rule, n, km.nodes, km.weights);
  km.values = covariance_gram(spec, km.nodes);
  km.symmetric = true;
  return km;
}

KernelMatrix build_kernel_matrix(const std::function<double(double, double)>& kernel, std::size_t n, NodeRule rule) {
  KernelMatrix km;
  node_rule(rule, n, km.nodes, km.weights);
  const auto N = static_cast<Eigen::Index>(n);
  km.values.resize(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index i = j; i < N; ++i) {
      const double v = kernel(km.nodes[static_cast<std::size_t>(i)], km.nodes[static_cast<std::size_t>(j)]);
      km.values(i, j) = v;
      km.values(j, i) = v;
    }
  }
  km.symmetric = true;
  return km;
}

Spectrum nystrom_eigs(const KernelMatrix& km) {
  if (!km.symmetric) throw DomainError("nystrom_eigs: kernel matrix must be symmetric");
  const auto n = static_cast<Eigen::Index>(km.nodes.size());
  Eigen::VectorXd sw(n);
  for (Eigen::Index i = 0; i < n; ++i) sw(i) = std::sqrt(km.weights[static_cast<std::size_t>(i)]);
  Eigen::MatrixXd a = sw.asDiagonal() * km.values * sw.asDiagonal();
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', static_cast<lapack_int>(n), a.data(),
                                         static_cast<lapack_int>(n), w.data());
  if (info != 0) throw LinalgError("nystrom_eigs: eigensolver failed (info " + std::to_string(info) + ")");
  Spectrum s;
  s.method = SpectrumMethod::NystromEig;
  s.n = static_cast<std::size_t>(n);
  for (double& x : clean_descending(std::move(w), s.n)) s.singular_values.push_back(std::sqrt(x));
  s.trusted_count = s.singular_values.size();
  return s;
}

Spectrum volterra_svd(const HurstProfile& profile, std::size_t n) {
  if (n < 16) throw DomainError("volterra_svd: n must be at least 16");
  profile.require_range(0.5, "volterra_svd");
  // Right singular functions behave like y^{-a} at 0 with a = max H - 1/2; cells graded as
  // y0 (j/n0)^q on [0, y0] make them bounded in the stretched variable.
  double h_max = 0.0;
  for (int i = 0; i <= 1000; ++i) h_max = std::max(h_max, profile(i / 1000.0));
  const double q = std::clamp(kGradingMargin / (2.0 - 2.0 * h_max), 1.0, 12.0);
  const std::vector<double> e = graded_edges(n, q);
  std::vector<double> x(n), w(n);
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = 0.5 * (e[j] + e[j + 1]);
    w[j] = e[j + 1] - e[j];
  }
  const auto N = static_cast<Eigen::Index>(n);
  const auto& gl = quad::cached_gauss_legendre(6);
  const auto& gl_near = quad::cached_gauss_legendre(12);
  // Collocation at the midpoints with the kernel integrated over each cell; the cells at y = 0
  // and y = x carry the integrable endpoint behaviour of the kernel.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double xi = x[ii];
    const VolterraKernel k(profile(xi));
    auto f = [&](double y) { return k(xi, y); };
    for (Eigen::Index j = 0; j <= i; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      const double lo = e[jj], hi = std::min(e[jj + 1], xi);
      // Tolerance on the weighted entry, not on the cell integral.
      const double tol = 1e-10 * std::sqrt(w[jj] / w[ii]);
      double v = 0.0;
      if (j == 0 || j == i) {
        v = quad::integrate_endpoint_singular(f, lo, hi, tol, 1e-8).value;
      } else if (hi > 1.5 * lo) {
        v = quad::integrate(f, lo, hi, tol, 1e-8).value;
      } else {
        const auto& rule = (j + 1 == i) ? gl_near : gl;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t r = 0; r < rule.size(); ++r) v += rule.weights[r] * f(mid + half * rule.nodes[r]);
        v *= half;
      }
      a(i, j) = v * std::sqrt(w[ii] / w[jj]);
    }
  }
  Spectrum s;
  s.method = SpectrumMethod::VolterraSVD;
  s.n = n;
  s.singular_values = clean_descending(singular_values(a), n);
  s.trusted_count = s.singular_values.size();
  return s;
}

double psido_symbol(double xi) {
  const double ax = std::abs(xi);
  if (ax <= 1.0) return 1.0;
  if (ax >= 2.0) return ax;
  const double t = ax - 1.0;
  const double step = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
  return 1.0 + step * (ax - 1.0);
}

Spectrum psido_svd(const HurstProfile& profile, const PsidoOptions& opt) {
  if (!(opt.m > 0.5)) throw DomainError("psido_svd: m must exceed 1/2");
  if (opt.a0 == 0.0 || !std::isfinite(opt.a0)) throw DomainError("psido_svd: a0 must be nonzero");
  if (opt.n_x < 16) throw DomainError("psido_svd: n_x must be at least 16");
  const double xi_max = opt.xi_max > 0.0 ? opt.xi_max : 4.0 * std::numbers::pi * static_cast<double>(opt.n_x);
  const std::size_t n_xi = opt.n_xi > 0 ? opt.n_xi : 8 * opt.n_x;
  if (xi_max < 64.0) throw DomainError("psido_svd: xi_max must be at least 64");
  if (n_xi % 2 != 0) throw DomainError("psido_svd: n_xi must be even");

  const double h_min = minimum_info(profile).h_min;
  std::vector<double> x, w;
  node_rule(NodeRule::Midpoint, opt.n_x, x, w);
  const double dxi = 2.0 * xi_max / static_cast<double>(n_xi);
  const std::size_t half = n_xi / 2;

  // M M* is real for an even symbol on a symmetric grid: pair +xi with -xi into cos and sin columns.
  const auto rows = static_cast<Eigen::Index>(opt.n_x);
  Eigen::MatrixXd r(rows, static_cast<Eigen::Index>(n_xi));
  const double scale = std::abs(opt.a0) * std::sqrt(2.0 * dxi / (2.0 * std::numbers::pi));
  for (Eigen::Index j = 0; j < rows; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    const double order = opt.m + (profile(x[jj]) - h_min);
    const double rw = scale * std::sqrt(w[jj]);
    for (std::size_t k = 0; k < half; ++k) {
      const double xi = (static_cast<double>(k) + 0.5) * dxi;
      const double amp = rw * std::pow(psido_symbol(xi), -order);
      r(j, static_cast<Eigen::Index>(k)) = amp * std::cos(x[jj] * xi);
      r(j, static_cast<Eigen::Index>(half + k)) = amp * std::sin(x[jj] * xi);
    }
  }
  Spectrum s;
  s.method = SpectrumMethod::PsidoSVD;
  s.n = opt.n_x;
  s.xi_max = xi_max;
  s.n_xi = n_xi;
  s.singular_values = clean_descending(singular_values(r), opt.n_x);
  // Singular values near |a0| p(xi)^{-m} need frequencies up to xi; keep a factor 2 of headroom.
  s.truncation_t = std::pow(0.5 * xi_max, opt.m) / std::abs(opt.a0);
  s.order = opt.m;
  const double floor = 1.0 / s.truncation_t;
  s.trusted_count = static_cast<std::size_t>(
      std::count_if(s.singular_values.begin(), s.singular_values.end(), [&](double v) { return v > floor; }));
  return s;
}

std::size_t counting(const Spectrum& spec, double t) {
  if (!(t > 0.0)) throw DomainError("counting: t must be positive");
  if (spec.truncation_t > 0.0 && t > spec.truncation_t) {
    std::ostringstream os;
    os << "counting: t = " << t << " exceeds the frequency cut-off (max t " << spec.truncation_t << ")";
    throw TruncationError(os.str(), spec.xi_max * std::pow(t / spec.truncation_t, 1.0 / spec.order));
  }
  const double tmax = spec.max_admissible_t();
  if (t > tmax) {
    std::ostringstream os;
    os << "counting: t = " << t << " lies beyond the trusted range (max admissible t " << tmax << ")";
    throw RangeError(os.str(), tmax);
  }
  const double level = 1.0 / t;
  const auto end = spec.singular_values.begin() + static_cast<std::ptrdiff_t>(spec.trusted_count);
  // Nonincreasing sequence: count the prefix strictly above the level.
  return static_cast<std::size_t>(
      std::partition_point(spec.singular_values.begin(), end, [&](double v) { return v > level; }) -
      spec.singular_values.begin());
}

std::size_t trusted_range(const Spectrum& a, const Spectrum& b, double rel_tol) {
  const std::size_t len = std::min(a.size(), b.size());
  std::size_t k = 0;
  while (k < len && std::abs(a.singular_values[k] - b.singular_values[k]) <= rel_tol * a.singular_values[k]) ++k;
  if (k == len && a.size() == b.size()) return a.size();
  return k;
}

Spectrum converged_spectrum(const std::function<Spectrum(std::size_t)>& run, std::size_t n, double rel_tol) {
  Spectrum full = run(n);
  const Spectrum half = run(n / 2);
  full.trusted_count = std::min({full.trusted_count, half.trusted_count, trusted_range(full, half, rel_tol)});
  return full;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spec) {
  const auto old = os.precision(17);
  os << "k,s_k,lambda_k,trusted\n";
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double s = spec.singular_values[k];
    os << (k + 1) << ',' << s << ',' << s * s << ',' << (k < spec.trusted_count ? 1 : 0) << '\n';
  }
  os.precision(old);
}

}  // namespace varhurst
