#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "varhurst/covariance.hpp"
#include "varhurst/hurst.hpp"

namespace varhurst {

enum class SpectrumMethod { NystromEig, VolterraSVD, PsidoSVD };

const char* method_name(SpectrumMethod m);

enum class NodeRule { Midpoint, GaussLegendre };

/// Discretized integral operator on [0, 1].
struct KernelMatrix {
  std::vector<double> nodes;
  std::vector<double> weights;
  Eigen::MatrixXd values;
  bool symmetric = false;
};

struct Spectrum {
  std::vector<double> singular_values;  // nonincreasing, positive
  SpectrumMethod method = SpectrumMethod::NystromEig;
  std::size_t n = 0;
  std::size_t trusted_count = 0;
  // Frequency-grid metadata of the pseudodifferential route (zero otherwise).
  double xi_max = 0.0;
  std::size_t n_xi = 0;
  /// Largest t whose counting value the frequency cut-off can support; 0 = unlimited.
  double truncation_t = 0.0;
  double order = 0.0;  // base order m of the pseudodifferential route

  std::size_t size() const noexcept { return singular_values.size(); }
  /// Squares of the singular values.
  std::vector<double> eigenvalues() const;
  /// 1 / s_K for K = trusted_count.
  double max_admissible_t() const;
};

/// Quadrature nodes and weights on [0, 1].
void node_rule(NodeRule rule, std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

KernelMatrix build_covariance_matrix(const CovarianceSpec& spec, std::size_t n, NodeRule rule = NodeRule::Midpoint);
/// Kernel matrix of an arbitrary symmetric kernel.
KernelMatrix build_kernel_matrix(const std::function<double(double, double)>& kernel, std::size_t n,
                                 NodeRule rule = NodeRule::Midpoint);

/// Eigenvalues of W^{1/2} G W^{1/2}; singular values are their square roots.
Spectrum nystrom_eigs(const KernelMatrix& km);

/// Singular values of the weighted Volterra collocation matrix.
Spectrum volterra_svd(const HurstProfile& profile, std::size_t n);

struct PsidoOptions {
  double m = 1.0;
  double a0 = 1.0;
  std::size_t n_x = 512;
  double xi_max = 0.0;    // 0: 4 pi n_x
  std::size_t n_xi = 0;   // 0: 8 n_x
};

/// Smooth even symbol: 1 on |xi| <= 1, |xi| on |xi| >= 2, quintic smoothstep in between.
double psido_symbol(double xi);

/// Singular values of the variable-order pseudodifferential operator, order m + h(x).
Spectrum psido_svd(const HurstProfile& profile, const PsidoOptions& opt);

/// #{k <= trusted_count : s_k > 1/t}. Throws RangeError past the trusted range and
/// TruncationError past the frequency cut-off.
std::size_t counting(const Spectrum& spec, double t);

/// Largest K with |s_k(n) - s_k(n/2)| <= rel_tol s_k(n) for all k <= K.
std::size_t trusted_range(const Spectrum& spec_n, const Spectrum& spec_half, double rel_tol = 1e-3);

/// Runs a discretization at n and n/2 and stores the trusted count in the first.
Spectrum converged_spectrum(const std::function<Spectrum(std::size_t)>& run, std::size_t n, double rel_tol = 1e-3);

/// CSV with columns k, s_k, lambda_k, trusted.
void write_spectrum_csv(std::ostream& os, const Spectrum& spec);

}  // namespace varhurst
