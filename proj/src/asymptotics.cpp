#include "varhurst/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "varhurst/errors.hpp"
#include "varhurst/quadrature.hpp"

namespace varhurst {

namespace {

constexpr double kPi = std::numbers::pi;

void fill_level_data(AsymptoticModel& m, const HurstProfile& profile) {
  const MinimumInfo info = minimum_info(profile);
  m.h_min = info.h_min;
  m.meas_d = info.meas_d;
  m.sigma = declared_sigma(profile);
  m.covered = profile.family() != Family::Cantor;
  if (m.covered && profile.family() != Family::Custom) m.phi = slowly_varying_factor(profile);
  m.profile = profile;
}

// The asymptotics see only H_min; the full range is checked where paths or kernels are built.
void fill_process_data(AsymptoticModel& m, const HurstProfile& profile, Process process) {
  fill_level_data(m, profile);
  const double h = m.h_min;
  if (process == Process::MFBM) {
    if (!(h > 0.5 && h < 1.0)) throw DomainError("mfbm model requires 1/2 < H_min < 1");
    m.kind = ModelKind::MFBM;
  } else {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("mbm model requires 0 < H_min < 1");
    m.kind = ModelKind::MBM;
  }
  m.m_frak = h + 0.5;
  const double norm = m.kind == ModelKind::MFBM ? c_star(h) * std::tgamma(h - 0.5) : std::sqrt(2.0 * kPi) * C_star(h);
  m.prefactor = std::pow(norm, 1.0 / m.m_frak) / kPi;
}

// Breakpoints of the counting integrand: the boundary of the minimum set, when it is small.
std::vector<double> breakpoints(const HurstProfile& profile) {
  std::vector<double> cuts{0.0, 1.0};
  const MinimumInfo info = minimum_info(profile);
  if (info.set.size() <= 256) {
    for (const auto& iv : info.set) {
      cuts.push_back(iv.lo);
      cuts.push_back(iv.hi);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [](double c) { return c < 0.0 || c > 1.0; }), cuts.end());
  return cuts;
}

}  // namespace

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::MBM: return "mbm";
    case ModelKind::MFBM: return "mfbm";
    case ModelKind::PSIDO: return "psido";
  }
  return "unknown";
}

const char* regime_name(Regime r) { return r == Regime::PositiveMeasureD ? "measD>0" : "measD=0"; }

double AsymptoticModel::kappa0() const { return kPi * prefactor; }

AsymptoticModel make_model(const HurstProfile& profile, Process process) {
  AsymptoticModel m;
  fill_process_data(m, profile, process);
  if (profile.family() == Family::Custom && m.meas_d == 0.0)
    throw DomainError("custom profile with a null minimum set: build the model from a level-measure fit");
  return m;
}

AsymptoticModel make_model(const HurstProfile& profile, Process process, const LevelMeasureFit& fit) {
  AsymptoticModel m = profile.family() == Family::Custom ? AsymptoticModel{} : make_model(profile, process);
  if (profile.family() == Family::Custom) fill_process_data(m, profile, process);
  m.sigma = fit.sigma;
  m.phi = slowly_varying_factor(fit);
  return m;
}

AsymptoticModel make_psido_model(const HurstProfile& profile, double order, double a0, double v) {
  if (!(order > 0.5)) throw DomainError("psido model: m must exceed 1/2");
  if (a0 == 0.0) throw DomainError("psido model: a0 must be nonzero");
  if (!(v > 0.0)) throw DomainError("psido model: v must be positive");
  AsymptoticModel m;
  m.kind = ModelKind::PSIDO;
  fill_level_data(m, profile);
  m.m_frak = order;
  m.order_m = order;
  m.a0 = a0;
  m.v = v;
  m.prefactor = std::pow(std::abs(a0), 1.0 / order) / (kPi * v);
  return m;
}

double counting_integral_scaled(const AsymptoticModel& model, const HurstProfile& profile, double t) {
  if (!(t > 1.0)) throw DomainError("theorem1_counting: t must exceed 1");
  const double lt = std::log(t);
  const double h_min = model.h_min;
  auto f = [&](double x) {
    const double h = profile(x) - h_min;
    const double base = model.m_frak;
    return std::exp(lt * (1.0 / (base + h) - 1.0 / base));
  };
  const std::vector<double> cuts = breakpoints(profile);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += quad::integrate(f, cuts[i], cuts[i + 1], 1e-14, 1e-11).value;
  return total;
}

double theorem1_counting(const AsymptoticModel& model, const HurstProfile& profile, double t) {
  return model.prefactor * std::pow(t, 1.0 / model.m_frak) * counting_integral_scaled(model, profile, t);
}

LaplaceTerms laplace_two_term(const AsymptoticModel& model, double t) {
  if (!(t > std::exp(1.0))) throw DomainError("laplace_two_term: need log t > 1");
  const double lt = std::log(t);
  const double scale = std::pow(t, 1.0 / model.m_frak);
  LaplaceTerms out;
  out.leading = scale * model.meas_d;
  if (model.sigma > 0.0 && model.phi) {
    out.second = scale * std::pow(model.m_frak, 2.0 * model.sigma) * std::tgamma(model.sigma + 1.0) *
                 std::pow(lt, -model.sigma) * model.phi(lt);
  }
  return out;
}

double eigen_tail(const AsymptoticModel& model, double k) {
  if (!model.covered) throw NotCoveredError("eigen_tail: profile not covered (level measure not regularly varying)");
  const double two_m = 2.0 * model.m_frak;
  if (model.meas_d > 0.0) {
    if (!(k >= 1.0)) throw DomainError("eigen_tail: k must be at least 1");
    return std::pow(model.kappa0() * model.meas_d / (kPi * k), two_m);
  }
  if (!(k > 1.0)) throw DomainError("eigen_tail: k must exceed 1 when meas D = 0");
  if (!model.phi) throw DomainError("eigen_tail: model has no slowly varying factor");
  const double lk = std::log(k);
  const double c = model.kappa0() * std::pow(model.m_frak, model.sigma) * std::tgamma(model.sigma + 1.0) / kPi;
  return std::pow(c * model.phi(lk) / (k * std::pow(lk, model.sigma)), two_m);
}

SmallBallPrediction smallball_prediction(const AsymptoticModel& model, double epsilon) {
  if (model.kind == ModelKind::PSIDO) throw DomainError("smallball_prediction: needs a process model");
  if (!model.covered)
    throw NotCoveredError("not covered by Theorem 2: the small-values measure is not regularly varying");
  if (!(epsilon > 0.0 && epsilon < std::exp(-1.0)))
    throw DomainError("smallball_prediction: epsilon must lie in (0, 1/e)");
  const double H = model.h_min;
  const double denom = (2.0 * H + 1.0) * std::sin(kPi / (2.0 * H + 1.0));
  const double gs = std::exp(std::lgamma(2.0 * H + 1.0)) * std::sin(kPi * H);
  SmallBallPrediction p;
  p.epsilon = epsilon;
  p.eps_power = std::pow(epsilon, -1.0 / H);
  if (model.meas_d > 0.0) {
    p.regime = Regime::PositiveMeasureD;
    p.slowly_varying = 1.0;
    p.constant = H * model.meas_d / denom * std::pow(gs * model.meas_d / denom, 1.0 / (2.0 * H));
  } else {
    if (!model.phi) throw DomainError("smallball_prediction: model has no slowly varying factor");
    p.regime = Regime::ZeroMeasureD;
    const double L = std::log(1.0 / epsilon);
    const double e = (2.0 * H + 1.0) / (2.0 * H);
    p.slowly_varying = std::pow(model.phi(L) / std::pow(L, model.sigma), e);
    const double inner = std::pow(gs, 1.0 / (2.0 * H + 1.0)) * std::tgamma(model.sigma + 1.0) *
                         std::pow(H * (H + 0.5), model.sigma) / denom;
    p.constant = H * std::pow(inner, e);
  }
  p.log_p = -p.eps_power * p.slowly_varying * p.constant;
  return p;
}

double example3_constant(const std::vector<Cusp>& cusps) {
  if (cusps.empty()) throw DomainError("example3_constant: no cusps");
  double gmax = 0.0;
  for (const auto& c : cusps) {
    if (!(c.gamma > 0.0)) throw DomainError("example3_constant: gamma must be positive");
    if (!(c.x0 >= 0.0 && c.x0 <= 1.0)) throw DomainError("example3_constant: cusp outside [0, 1]");
    gmax = std::max(gmax, c.gamma);
  }
  // Interior points weigh 2 and boundary points 1 in the slowly varying factor.
  double weight = 0.0;
  for (const auto& c : cusps)
    if (c.gamma >= gmax * (1.0 - 1e-12)) weight += (c.x0 > 0.0 ? 1.0 : 0.0) + (c.x0 < 1.0 ? 1.0 : 0.0);
  return std::pow(2.0, -1.0 - 2.0 / gmax) * 0.25 * weight * weight;
}

}  // namespace varhurst
