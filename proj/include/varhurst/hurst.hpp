#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace varhurst {

enum class Family { Constant, PowerPlateau, PowerCusp, MinOfCusps, PowerLog, Cantor, Custom };

const char* family_name(Family f);

struct Cusp {
  double x0;
  double gamma;
};

/// Closed interval [lo, hi]; lo == hi encodes an isolated point.
struct Interval {
  double lo;
  double hi;
};

struct MinimumInfo {
  double h_min = 0.0;
  double meas_d = 0.0;
  std::vector<Interval> set;
};

struct LevelMeasureFit {
  double sigma = 0.0;         // exact index for built-in families, fitted otherwise
  double fitted_sigma = 0.0;  // least-squares slope of log m against log s
  /// Coefficient of log log(1/s) in log(m / s^sigma); zero for pure power laws.
  double log_exponent = 0.0;
  std::vector<std::pair<double, double>> phi_samples;  // (s, m(s) / s^sigma)
  double s_lo = 0.0;
  double s_hi = 0.0;
  double residual = 0.0;  // max |log m - fitted line|
};

/// Variable Hurst parameter on [0, 1]. Immutable after construction.
class HurstProfile {
 public:
  static HurstProfile constant(double h);
  /// H = base + (x - x0)_+^gamma, flat on [0, x0].
  static HurstProfile power_plateau(double x0, double gamma, double base = 0.5);
  /// H = base + |x - x0|^gamma.
  static HurstProfile power_cusp(double x0, double gamma, double base = 0.5);
  /// H = base + min_k |x - x_k|^gamma_k.
  static HurstProfile min_of_cusps(std::vector<Cusp> cusps, double base = 0.5);
  /// H = base + |x - x0|^gamma log^b(1/|x - x0|), x0 interior.
  static HurstProfile power_log(double x0, double gamma, double b, double base = 0.5);
  /// H = base + dist(x, C)^gamma, C the Cantor set resolved to `depth` ternary levels.
  static HurstProfile cantor(double gamma, int depth = 12, double base = 0.5);
  /// User-supplied evaluator. `sigma` <= 0 means "fit it from the level measure".
  static HurstProfile custom(std::function<double(double)> h, double declared_h_min, double sigma = 0.0,
                             double holder_exponent = 1.0);

  Family family() const noexcept { return family_; }
  double base() const noexcept { return base_; }
  double gamma() const noexcept { return gamma_; }
  double x0() const noexcept { return x0_; }
  double log_power() const noexcept { return b_; }
  int depth() const noexcept { return depth_; }
  const std::vector<Cusp>& cusps() const noexcept { return cusps_; }

  /// Exponent kappa with H - H_min <= C dist(x, D)^kappa.
  double holder_exponent() const noexcept { return kappa_; }
  /// Whether 0 < H < 1 (resp. 1/2 < H < 1) held on the validation grid.
  bool valid_for_mbm() const noexcept { return valid_mbm_; }
  bool valid_for_mfbm() const noexcept { return valid_mfbm_; }
  /// Throws DomainError naming the violated bound unless H stays in (lo, 1).
  void require_range(double lo, const char* process) const;

  double operator()(double x) const;

  /// Short description, e.g. "power_cusp(x0=0.5, gamma=2, base=0.5)".
  std::string describe() const;

 private:
  HurstProfile() = default;
  void validate();
  double raw(double x) const;

  Family family_ = Family::Constant;
  double base_ = 0.5;
  double x0_ = 0.0;
  double gamma_ = 1.0;
  double b_ = 0.0;
  int depth_ = 0;
  double kappa_ = 1.0;
  double declared_sigma_ = 0.0;
  std::vector<Cusp> cusps_;
  std::function<double(double)> custom_;
  bool valid_mbm_ = false;
  bool valid_mfbm_ = false;
  double h_lo_ = 0.0;
  double h_hi_ = 0.0;

  friend MinimumInfo minimum_info(const HurstProfile&);
  friend double declared_sigma(const HurstProfile&);
};

double eval_H(const HurstProfile& profile, double x);

MinimumInfo minimum_info(const HurstProfile& profile);

/// meas{x in [0,1] : 0 < H(x) - H_min < s}.
double level_measure(const HurstProfile& profile, double s);
/// log of level_measure, accurate for s down to the smallest normal double.
double log_level_measure(const HurstProfile& profile, double s);

/// Known regular-variation index of the level measure, or 0 if it must be fitted.
double declared_sigma(const HurstProfile& profile);

/// Log-log regression of the level measure over log-spaced samples of [s_lo, s_hi].
LevelMeasureFit fit_sigma_phi(const HurstProfile& profile, double s_lo = 1e-6, double s_hi = 1e-2,
                              std::size_t samples = 64);
LevelMeasureFit fit_sigma_phi(const HurstProfile& profile, const std::vector<double>& s_grid);

/// Function comparable to dist(x, D); exact distance except for Cantor profiles.
double regularized_distance(const HurstProfile& profile, double x);
/// Exact dist(x, D).
double distance_to_minimum(const HurstProfile& profile, double x);

/// Slowly varying factor phi(y) of the level measure, y = 1/s large.
std::function<double(double)> slowly_varying_factor(const HurstProfile& profile);
/// Same, interpolated in log y from fitted samples (constant outside the sampled range).
std::function<double(double)> slowly_varying_factor(const LevelMeasureFit& fit);

}  // namespace varhurst
