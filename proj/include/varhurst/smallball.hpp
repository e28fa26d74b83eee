#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "varhurst/asymptotics.hpp"
#include "varhurst/covariance.hpp"
#include "varhurst/spectrum.hpp"

namespace varhurst {

/// Eigenvalues lambda_1 >= lambda_2 >= ...: a stored head followed by a lazily evaluated tail.
struct EigenSequence {
  std::vector<double> head;
  /// lambda at index k (1-based), before scaling; empty when there is no tail.
  std::function<double(double)> tail;
  std::optional<AsymptoticModel> model;
  std::size_t tail_first = 0;  // first tail index, 1-based
  std::size_t tail_last = 0;   // last tail index, inclusive
  double scale = 1.0;          // applied to tail values
  double mismatch = 0.0;       // |lambda_K / tail(K) - 1| before rescaling

  std::size_t size() const noexcept;
  /// Value at 0-based position i.
  double operator[](std::size_t i) const;
  /// Applies f to every value in order.
  void for_each(const std::function<void(double)>& f) const;
  double sum() const;

  static EigenSequence from_values(std::vector<double> values);
  /// Values f(k) for k = first..last, never stored.
  static EigenSequence from_function(std::function<double(double)> f, std::size_t first, std::size_t last);
};

/// Head = trusted eigenvalues of `spec`; tail = eigen_tail(model, k) for K < k <= N, rescaled to
/// match lambda_K. Throws SpliceError when the unscaled mismatch exceeds `max_mismatch`.
EigenSequence tail_completion(const Spectrum& spec, const std::optional<AsymptoticModel>& model, std::size_t N,
                              double max_mismatch = 0.25);

/// Sequence generated from eigen_tail alone, k = first..N (first = 2 when meas D = 0).
EigenSequence synthetic_sequence(const AsymptoticModel& model, std::size_t N);

enum class SaddleMethod {
  Exact,    // tilted inversion contour through the saddle point, integrated numerically
  Gaussian  // saddle point with the Gaussian curvature correction only
};

struct SaddleResult {
  double log_p = 0.0;
  double gamma = 0.0;      // tilting parameter (may be negative)
  bool complementary = false;  // eps^2 above the mean: P = 1 - P(S > eps^2)
  double log_mgf = 0.0;    // gamma eps^2 - sum log(1 + 2 gamma lambda) / 2
  double curvature = 0.0;  // sum 2 lambda^2 / (1 + 2 gamma lambda)^2
};

/// log P(sum lambda_k xi_k^2 <= eps^2), xi_k i.i.d. standard normal.
SaddleResult saddlepoint(const EigenSequence& seq, double epsilon, SaddleMethod method = SaddleMethod::Exact);
double saddlepoint_logP(const EigenSequence& seq, double epsilon, SaddleMethod method = SaddleMethod::Exact);

struct PathSample {
  std::vector<double> grid;  // midpoints (i + 1/2) / n
  Eigen::MatrixXd paths;     // one path per row
  double jitter = 0.0;       // diagonal shift used, relative to the mean diagonal
};

/// Gaussian paths by Cholesky of the grid Gram matrix. Normals come from std::mt19937_64 through a
/// Box-Muller transform, so a seed reproduces bit-identical paths on any platform.
PathSample simulate_paths(const CovarianceSpec& spec, std::size_t grid_n, std::size_t n_paths, std::uint64_t seed);

struct McEstimate {
  double p_hat = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t hits = 0;
  std::size_t n_paths = 0;
  bool upper_bound_only = false;  // zero hits: only `hi` is informative
};

/// Fraction of paths with midpoint L2 norm <= eps, with a Wilson 95% interval.
McEstimate mc_smallball(const PathSample& sample, double epsilon);

struct CompareConfig {
  std::size_t n = 1024;
  SpectrumMethod method = SpectrumMethod::NystromEig;
  std::size_t tail_n = 1000000;
  bool synthetic = false;
  double max_mismatch = 0.25;
  SaddleMethod saddle = SaddleMethod::Exact;
  std::size_t mc_paths = 0;  // 0: no Monte Carlo column
  std::size_t mc_grid = 256;
  std::uint64_t seed = 1;
};

struct SmallBallRow {
  double epsilon = 0.0;
  double oracle_log_p = 0.0;
  double prediction_log_p = 0.0;
  double ratio = 0.0;  // NaN unless both entries are finite
  std::optional<McEstimate> mc;
};

struct SmallBallReport {
  std::vector<SmallBallRow> rows;
  Regime regime = Regime::PositiveMeasureD;
  double mismatch = 0.0;
  std::size_t head_size = 0;
  std::size_t tail_n = 0;
};

/// Oracle log-probabilities from the spectrum with a spliced tail (or the synthetic sequence)
/// against the logarithmic prediction.
SmallBallReport compare(const HurstProfile& profile, Process process, const std::vector<double>& eps_grid,
                        const CompareConfig& config = {});

/// Columns epsilon, oracle_log_p, prediction_log_p, ratio, mc_p, mc_lo, mc_hi.
void write_report_csv(std::ostream& os, const SmallBallReport& report);

}  // namespace varhurst
