#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "varhurst/covariance.hpp"
#include "varhurst/hurst.hpp"

namespace varhurst {

enum class ModelKind { MBM, MFBM, PSIDO };

const char* model_kind_name(ModelKind k);

/// Constants of the one-term spectral asymptotics for one profile and one operator.
struct AsymptoticModel {
  ModelKind kind = ModelKind::MBM;
  double h_min = 0.5;
  double m_frak = 1.0;  // H_min + 1/2, or the base order m of a pseudodifferential operator
  double sigma = 0.0;
  double meas_d = 0.0;
  std::function<double(double)> phi;  // slowly varying factor, argument y = 1/s large
  double prefactor = 1.0 / 3.141592653589793;  // constant in front of the counting integral
  // Pseudodifferential parameters.
  double order_m = 0.0;
  double a0 = 0.0;
  double v = 1.0;
  /// False when the level measure is not regularly varying (Cantor profiles).
  bool covered = true;
  std::optional<HurstProfile> profile;

  /// pi * prefactor: (Gamma(2H_min+1) sin(pi H_min))^{1/(2 m_frak)} for processes.
  double kappa0() const;
};

/// Model for the covariance operator of an mBM / FBM (MBM) or the Volterra operator of an mfBM.
AsymptoticModel make_model(const HurstProfile& profile, Process process);
/// Same, with the slowly varying factor and (if not declared) sigma taken from a level-measure fit.
AsymptoticModel make_model(const HurstProfile& profile, Process process, const LevelMeasureFit& fit);
/// Pseudodifferential operator of order m + h(x) with multiplier a0 and symbol growth v|xi|.
AsymptoticModel make_psido_model(const HurstProfile& profile, double m, double a0, double v = 1.0);

/// prefactor * integral over [0,1] of t^{1/(H(x)+1/2)} (resp. t^{1/(m+h(x))}).
double theorem1_counting(const AsymptoticModel& model, const HurstProfile& profile, double t);
/// The integral alone, divided by t^{1/m_frak}.
double counting_integral_scaled(const AsymptoticModel& model, const HurstProfile& profile, double t);

struct LaplaceTerms {
  double leading = 0.0;
  double second = 0.0;
};

/// Two-term Laplace expansion of the counting integral (without the prefactor).
LaplaceTerms laplace_two_term(const AsymptoticModel& model, double t);

/// Predicted eigenvalue lambda_k = s_k^2, k >= 2.
double eigen_tail(const AsymptoticModel& model, double k);

enum class Regime { PositiveMeasureD, ZeroMeasureD };

const char* regime_name(Regime r);

struct SmallBallPrediction {
  double epsilon = 0.0;
  double log_p = 0.0;
  Regime regime = Regime::PositiveMeasureD;
  double eps_power = 0.0;        // eps^{-1/H_min}
  double slowly_varying = 1.0;   // (phi(L) / L^sigma)^{(2H+1)/(2H)}, L = log(1/eps); 1 when meas D > 0
  double constant = 0.0;         // remaining constant factor
};

/// Logarithmic small-ball asymptotics in L2(0,1); identical for mBM and mfBM.
SmallBallPrediction smallball_prediction(const AsymptoticModel& model, double epsilon);

/// Constant C in log P ~ -C Gamma^2(1+1/gamma) (eps log^{1/gamma}(1/eps))^{-2} for min-of-cusps profiles.
double example3_constant(const std::vector<Cusp>& cusps);

}  // namespace varhurst
