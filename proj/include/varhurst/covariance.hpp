#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "varhurst/hurst.hpp"

namespace varhurst {

/// Normalizer of the harmonizable representation, sqrt(Gamma(2H+1) sin(pi H) / (2 pi)).
double C_star(double H);
/// Normalizer of the Volterra kernel, 1/2 < H < 1.
double c_star(double H);

/// (x^{2H} + y^{2H} - |x-y|^{2H}) / 2.
double fbm_cov(double H, double x, double y);

/// Covariance of the harmonizable multifractional process.
double mbm_cov(const HurstProfile& profile, double x, double y);

/// Integral of w^{H-3/2} ((1+w)^{H-1/2} - 1) over [0, s].
double mfbm_Phi(double s, double H);

/// Volterra kernel of the multifractal process at a fixed Hurst value; caches the constants.
class VolterraKernel {
 public:
  explicit VolterraKernel(double H);

  double H() const noexcept { return H_; }
  /// Phi(s) for this H (series / Gauss-Legendre, no interpolation).
  double Phi(double s) const;
  /// Phi(s) / s^{H-1/2} from Chebyshev fits of the series above.
  double Phi_scaled(double s) const;
  /// K(x, y); zero outside 0 < y < x.
  double operator()(double x, double y) const;
  /// K(x, y) / (x - y)^{H-1/2}, smooth up to y = x.
  double regular_part(double x, double y) const;

 private:
  struct Chebyshev {
    double lo = 0.0, hi = 1.0;
    std::array<double, 24> c{};
    double operator()(double s) const;
  };
  template <class F>
  static Chebyshev fit(F f, double lo, double hi);
  double small_series(double s) const;  // (Phi(s)/s^a)/s for s <= 1/2
  double large_series(double z) const;  // sum_k binom(a,k) z^k / (2a-k)

  double H_, a_, c_, coeff_;
  double phi_half_, phi_two_;
  double far_const_;
  std::vector<double> binom_;  // binom(a, k), k = 0..
  Chebyshev near_, mid_lo_, mid_hi_, far_;
};

double mfbm_K(double x, double y, double H);

/// Covariance of the multifractal process by adaptive quadrature of the kernel product.
double mfbm_cov(const HurstProfile& profile, double x, double y, double tol = 1e-8);

enum class Process { FBM, MBM, MFBM };

const char* process_name(Process p);

class CovarianceSpec {
 public:
  static CovarianceSpec fbm(double H);
  static CovarianceSpec mbm(const HurstProfile& profile);
  static CovarianceSpec mfbm(const HurstProfile& profile);

  Process process() const noexcept { return process_; }
  const HurstProfile& profile() const noexcept { return profile_; }
  double quadrature_tolerance() const noexcept { return tol_; }
  CovarianceSpec& with_tolerance(double tol);

  double operator()(double x, double y) const;

 private:
  CovarianceSpec(Process p, HurstProfile profile) : process_(p), profile_(std::move(profile)) {}
  Process process_;
  HurstProfile profile_;
  double tol_ = 1e-8;
};

/// Gram matrix G(x_i, x_j) on strictly increasing nodes in (0, 1].
/// The multifractal case uses panel quadrature between consecutive nodes.
Eigen::MatrixXd covariance_gram(const CovarianceSpec& spec, const std::vector<double>& nodes);

}  // namespace varhurst
