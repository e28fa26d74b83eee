#include "varhurst/hurst.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "varhurst/errors.hpp"
#include "varhurst/quadrature.hpp"

namespace varhurst {

namespace {

constexpr std::size_t kValidationGrid = 4001;
constexpr std::size_t kCustomGrid = 100001;
constexpr std::size_t kCustomMeasureGrid = std::size_t{1} << 20;

double check_gamma(double gamma, const char* who) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError(std::string(who) + ": gamma must be positive");
  return gamma;
}

void check_base(double base, const char* who) {
  if (!(base > 0.0 && base < 1.0)) throw DomainError(std::string(who) + ": base level must lie in (0, 1)");
}

// Distance from x to the endpoints of the depth-level ternary intervals.
double cantor_distance(double x, int depth) {
  if (x <= 0.0) return -x;
  if (x >= 1.0) return x - 1.0;
  double a = 0.0, len = 1.0;
  for (int level = 0; level < depth; ++level) {
    const double third = len / 3.0;
    if (x <= a + third) {
      len = third;
    } else if (x >= a + 2.0 * third) {
      a += 2.0 * third;
      len = third;
    } else {
      return std::min(x - (a + third), a + 2.0 * third - x);
    }
  }
  return std::min(x - a, a + len - x);
}

void cantor_points(double a, double len, int depth, std::vector<Interval>& out) {
  if (depth == 0) {
    out.push_back({a, a});
    out.push_back({a + len, a + len});
    return;
  }
  cantor_points(a, len / 3.0, depth - 1, out);
  cantor_points(a + 2.0 * len / 3.0, len / 3.0, depth - 1, out);
}

double cantor_level_measure(double delta, int depth) {
  double m = 0.0;
  double gaps = 1.0, size = 1.0 / 3.0;
  for (int k = 1; k <= depth; ++k) {
    m += gaps * std::min(size, 2.0 * delta);
    gaps *= 2.0;
    size /= 3.0;
  }
  // The 2^depth innermost intervals, each a gap between two retained endpoints.
  m += gaps * std::min(3.0 * size, 2.0 * delta);
  return std::min(m, 1.0);
}

// g(d) = d^gamma log^b(1/d) on 0 < d < 1, handled through log g.
struct PowerLogBranch {
  double gamma, b;

  double log_g(double log_d) const { return gamma * log_d + b * std::log(-log_d); }
  // log d at the peak of g (b > 0), or 0 when g increases on the whole of (0, 1).
  double log_peak() const { return b > 0.0 ? -b / gamma : 0.0; }

  // Root of log g = log_s on the increasing branch, as log d; +inf if the branch lies below log_s.
  double increasing_root(double log_s) const {
    const double hi = log_peak();
    if (b > 0.0 && log_s >= log_g(hi)) return std::numeric_limits<double>::infinity();
    double lo = std::min(log_s / gamma, hi) - 1.0;
    while (log_g(lo) >= log_s) lo *= 2.0;
    double top = hi;
    if (b <= 0.0) {
      // Stay clear of log d = 0 where log(-log d) is singular.
      top = -1e-300;
      if (log_g(top) <= log_s) return std::numeric_limits<double>::infinity();
    }
    auto f = [&](double ld) { return log_g(ld) - log_s; };
    boost::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, top, boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
  }

  // meas{d in (0, L) : g(d) < s} for a side of length L < 1.
  double side_measure(double L, double log_s) const {
    if (L <= 0.0) return 0.0;
    const double log_L = std::log(L);
    const double pk = log_peak();
    double m = 0.0;
    const double r1 = increasing_root(log_s);
    m += std::exp(std::min({r1, pk, log_L}));
    if (b > 0.0 && log_L > pk) {
      // Decreasing branch on [d_peak, L].
      const double gl = log_g(log_L);
      if (log_s > gl) {
        if (log_s >= log_g(pk)) {
          m += L - std::exp(pk);
        } else {
          auto f = [&](double ld) { return log_g(ld) - log_s; };
          boost::uintmax_t iters = 200;
          auto r = boost::math::tools::toms748_solve(f, pk, log_L, boost::math::tools::eps_tolerance<double>(52),
                                                     iters);
          m += L - std::exp(0.5 * (r.first + r.second));
        }
      }
    }
    return m;
  }
};

std::vector<Interval> merge(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

int sides(double x0) { return (x0 > 0.0 ? 1 : 0) + (x0 < 1.0 ? 1 : 0); }

double log_sum_exp(const std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::Constant: return "constant";
    case Family::PowerPlateau: return "power_plateau";
    case Family::PowerCusp: return "power_cusp";
    case Family::MinOfCusps: return "min_of_cusps";
    case Family::PowerLog: return "power_log";
    case Family::Cantor: return "cantor";
    case Family::Custom: return "custom";
  }
  return "unknown";
}

HurstProfile HurstProfile::constant(double h) {
  check_base(h, "constant");
  HurstProfile p;
  p.family_ = Family::Constant;
  p.base_ = h;
  p.validate();
  return p;
}

HurstProfile HurstProfile::power_plateau(double x0, double gamma, double base) {
  if (!(x0 > 0.0 && x0 <= 1.0)) throw DomainError("power_plateau: x0 must lie in (0, 1]");
  check_base(base, "power_plateau");
  HurstProfile p;
  p.family_ = Family::PowerPlateau;
  p.x0_ = x0;
  p.gamma_ = check_gamma(gamma, "power_plateau");
  p.base_ = base;
  p.kappa_ = gamma;
  p.validate();
  return p;
}

HurstProfile HurstProfile::power_cusp(double x0, double gamma, double base) {
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw DomainError("power_cusp: x0 must lie in [0, 1]");
  check_base(base, "power_cusp");
  HurstProfile p;
  p.family_ = Family::PowerCusp;
  p.x0_ = x0;
  p.gamma_ = check_gamma(gamma, "power_cusp");
  p.base_ = base;
  p.kappa_ = gamma;
  p.validate();
  return p;
}

HurstProfile HurstProfile::min_of_cusps(std::vector<Cusp> cusps, double base) {
  if (cusps.empty()) throw DomainError("min_of_cusps: at least one cusp required");
  check_base(base, "min_of_cusps");
  double kappa = std::numeric_limits<double>::infinity();
  for (const auto& c : cusps) {
    if (!(c.x0 >= 0.0 && c.x0 <= 1.0)) throw DomainError("min_of_cusps: cusp location must lie in [0, 1]");
    check_gamma(c.gamma, "min_of_cusps");
    kappa = std::min(kappa, c.gamma);
  }
  HurstProfile p;
  p.family_ = Family::MinOfCusps;
  p.cusps_ = std::move(cusps);
  p.base_ = base;
  p.kappa_ = kappa;
  p.gamma_ = std::max_element(p.cusps_.begin(), p.cusps_.end(), [](auto& a, auto& b) { return a.gamma < b.gamma; })
                 ->gamma;
  p.validate();
  return p;
}

HurstProfile HurstProfile::power_log(double x0, double gamma, double b, double base) {
  if (!(x0 > 0.0 && x0 < 1.0)) throw DomainError("power_log: x0 must lie in (0, 1)");
  if (!std::isfinite(b)) throw DomainError("power_log: b must be finite");
  check_base(base, "power_log");
  HurstProfile p;
  p.family_ = Family::PowerLog;
  p.x0_ = x0;
  p.gamma_ = check_gamma(gamma, "power_log");
  p.b_ = b;
  p.base_ = base;
  // A positive log power costs a little of the power exponent.
  p.kappa_ = b > 0.0 ? 0.9 * gamma : gamma;
  p.validate();
  return p;
}

HurstProfile HurstProfile::cantor(double gamma, int depth, double base) {
  if (depth < 1 || depth > 24) throw DomainError("cantor: depth must lie in [1, 24]");
  check_base(base, "cantor");
  HurstProfile p;
  p.family_ = Family::Cantor;
  p.gamma_ = check_gamma(gamma, "cantor");
  p.depth_ = depth;
  p.base_ = base;
  p.kappa_ = gamma;
  p.validate();
  return p;
}

HurstProfile HurstProfile::custom(std::function<double(double)> h, double declared_h_min, double sigma,
                                  double holder_exponent) {
  if (!h) throw DomainError("custom: evaluator is empty");
  HurstProfile p;
  p.family_ = Family::Custom;
  p.custom_ = std::move(h);
  p.base_ = declared_h_min;
  p.declared_sigma_ = sigma;
  p.kappa_ = holder_exponent;
  p.validate();
  // Continuity: no jump larger than 1e-2 between neighbours of a fine grid.
  double prev = p.raw(0.0);
  for (std::size_t i = 1; i < kCustomGrid; ++i) {
    const double v = p.raw(static_cast<double>(i) / static_cast<double>(kCustomGrid - 1));
    if (!std::isfinite(v)) throw DomainError("custom: evaluator returned a non-finite value");
    if (std::abs(v - prev) > 1e-2) throw DomainError("custom: profile is not continuous on the validation grid");
    prev = v;
  }
  return p;
}

void HurstProfile::validate() {
  h_lo_ = std::numeric_limits<double>::infinity();
  h_hi_ = -h_lo_;
  for (std::size_t i = 0; i < kValidationGrid; ++i) {
    const double v = raw(static_cast<double>(i) / static_cast<double>(kValidationGrid - 1));
    if (!std::isfinite(v)) throw DomainError(describe() + ": H is not finite on [0, 1]");
    h_lo_ = std::min(h_lo_, v);
    h_hi_ = std::max(h_hi_, v);
  }
  valid_mbm_ = h_lo_ > 0.0 && h_hi_ < 1.0;
  valid_mfbm_ = h_lo_ > 0.5 && h_hi_ < 1.0;
}

void HurstProfile::require_range(double lo, const char* process) const {
  if (!(h_lo_ > lo && h_hi_ < 1.0)) {
    std::ostringstream os;
    os << process << " requires " << lo << " < H(x) < 1 on [0,1], but " << describe() << " ranges over [" << h_lo_
       << ", " << h_hi_ << "]";
    throw DomainError(os.str());
  }
}

double HurstProfile::raw(double x) const {
  switch (family_) {
    case Family::Constant: return base_;
    case Family::PowerPlateau: return base_ + (x > x0_ ? std::pow(x - x0_, gamma_) : 0.0);
    case Family::PowerCusp: return base_ + std::pow(std::abs(x - x0_), gamma_);
    case Family::MinOfCusps: {
      double h = std::numeric_limits<double>::infinity();
      for (const auto& c : cusps_) h = std::min(h, std::pow(std::abs(x - c.x0), c.gamma));
      return base_ + h;
    }
    case Family::PowerLog: {
      const double d = std::abs(x - x0_);
      if (d == 0.0) return base_;
      return base_ + std::pow(d, gamma_) * std::pow(std::log(1.0 / d), b_);
    }
    case Family::Cantor: return base_ + std::pow(cantor_distance(x, depth_), gamma_);
    case Family::Custom: return custom_(x);
  }
  return base_;
}

double HurstProfile::operator()(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("eval_H: x must lie in [0, 1]");
  return raw(x);
}

std::string HurstProfile::describe() const {
  std::ostringstream os;
  os << family_name(family_) << "(";
  switch (family_) {
    case Family::Constant: os << "H=" << base_; break;
    case Family::PowerPlateau:
    case Family::PowerCusp: os << "x0=" << x0_ << ", gamma=" << gamma_ << ", base=" << base_; break;
    case Family::MinOfCusps:
      for (const auto& c : cusps_) os << "(" << c.x0 << ", " << c.gamma << "), ";
      os << "base=" << base_;
      break;
    case Family::PowerLog: os << "x0=" << x0_ << ", gamma=" << gamma_ << ", b=" << b_ << ", base=" << base_; break;
    case Family::Cantor: os << "gamma=" << gamma_ << ", depth=" << depth_ << ", base=" << base_; break;
    case Family::Custom: os << "declared H_min=" << base_; break;
  }
  os << ")";
  return os.str();
}

double eval_H(const HurstProfile& profile, double x) { return profile(x); }

MinimumInfo minimum_info(const HurstProfile& p) {
  MinimumInfo info;
  info.h_min = p.base_;
  switch (p.family_) {
    case Family::Constant:
      info.meas_d = 1.0;
      info.set = {{0.0, 1.0}};
      break;
    case Family::PowerPlateau:
      info.meas_d = p.x0_;
      info.set = {{0.0, p.x0_}};
      break;
    case Family::PowerCusp:
    case Family::PowerLog: info.set = {{p.x0_, p.x0_}}; break;
    case Family::MinOfCusps:
      for (const auto& c : p.cusps_) info.set.push_back({c.x0, c.x0});
      info.set = merge(info.set);
      break;
    case Family::Cantor: cantor_points(0.0, 1.0, p.depth_, info.set); break;
    case Family::Custom: {
      double grid_min = std::numeric_limits<double>::infinity();
      std::vector<double> values(kCustomGrid);
      for (std::size_t i = 0; i < kCustomGrid; ++i) {
        values[i] = p.raw(static_cast<double>(i) / static_cast<double>(kCustomGrid - 1));
        grid_min = std::min(grid_min, values[i]);
      }
      if (grid_min < p.base_ - 1e-10 || grid_min > p.base_ + 1e-4) {
        std::ostringstream os;
        os << "custom profile: grid minimum " << grid_min << " disagrees with declared H_min " << p.base_;
        throw ConsistencyError(os.str());
      }
      const double step = 1.0 / static_cast<double>(kCustomGrid - 1);
      std::size_t at_min = 0;
      for (std::size_t i = 0; i < kCustomGrid; ++i) {
        if (values[i] - p.base_ > 1e-12) continue;
        ++at_min;
        const double x = static_cast<double>(i) * step;
        if (!info.set.empty() && info.set.back().hi >= x - 1.5 * step) {
          info.set.back().hi = x;
        } else {
          info.set.push_back({x, x});
        }
      }
      info.meas_d = at_min > 1 ? static_cast<double>(at_min - 1) * step : 0.0;
      if (at_min > 1) {
        info.meas_d = 0.0;
        for (const auto& iv : info.set) info.meas_d += iv.hi - iv.lo;
      }
      break;
    }
  }
  return info;
}

double level_measure(const HurstProfile& p, double s) {
  if (!(s > 0.0)) throw DomainError("level_measure: s must be positive");
  switch (p.family()) {
    case Family::Constant: return 0.0;
    case Family::PowerPlateau: return std::min(std::pow(s, 1.0 / p.gamma()), 1.0 - p.x0());
    case Family::PowerCusp: {
      const double delta = std::pow(s, 1.0 / p.gamma());
      return std::min(p.x0(), delta) + std::min(1.0 - p.x0(), delta);
    }
    case Family::MinOfCusps: {
      std::vector<Interval> pieces;
      for (const auto& c : p.cusps()) {
        const double delta = std::pow(s, 1.0 / c.gamma);
        pieces.push_back({std::max(0.0, c.x0 - delta), std::min(1.0, c.x0 + delta)});
      }
      double m = 0.0;
      for (const auto& iv : merge(pieces)) m += iv.hi - iv.lo;
      return m;
    }
    case Family::PowerLog: {
      const PowerLogBranch g{p.gamma(), p.log_power()};
      const double ls = std::log(s);
      return g.side_measure(p.x0(), ls) + g.side_measure(1.0 - p.x0(), ls);
    }
    case Family::Cantor: return cantor_level_measure(std::pow(s, 1.0 / p.gamma()), p.depth());
    case Family::Custom: {
      const double h_min = p.base();
      std::size_t count = 0;
      for (std::size_t i = 0; i < kCustomMeasureGrid; ++i) {
        const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(kCustomMeasureGrid);
        const double h = p(x) - h_min;
        if (h > 0.0 && h < s) ++count;
      }
      return static_cast<double>(count) / static_cast<double>(kCustomMeasureGrid);
    }
  }
  return 0.0;
}

double log_level_measure(const HurstProfile& p, double s) {
  if (!(s > 0.0)) throw DomainError("log_level_measure: s must be positive");
  const double ls = std::log(s);
  switch (p.family()) {
    case Family::PowerPlateau:
      if (ls / p.gamma() < std::log(1.0 - p.x0())) return ls / p.gamma();
      break;
    case Family::PowerCusp:
      if (ls / p.gamma() < std::log(std::min(p.x0(), 1.0 - p.x0())) || p.x0() == 0.0 || p.x0() == 1.0) {
        if (ls / p.gamma() < -600.0) return std::log(static_cast<double>(sides(p.x0()))) + ls / p.gamma();
      }
      break;
    case Family::MinOfCusps: {
      std::vector<double> terms;
      bool tiny = true;
      for (const auto& c : p.cusps()) {
        terms.push_back(std::log(static_cast<double>(sides(c.x0))) + ls / c.gamma);
        tiny = tiny && ls / c.gamma < -600.0;
      }
      if (tiny) return log_sum_exp(terms);
      break;
    }
    case Family::PowerLog: {
      const PowerLogBranch g{p.gamma(), p.log_power()};
      const double r = g.increasing_root(ls);
      if (r < -600.0) return std::log(2.0) + r;
      break;
    }
    case Family::Cantor: {
      const double ld = ls / p.gamma();
      if (ld < -600.0) return std::log(2.0 * (std::ldexp(2.0, p.depth()) - 1.0)) + ld;
      break;
    }
    default: break;
  }
  return std::log(level_measure(p, s));
}

double declared_sigma(const HurstProfile& p) {
  switch (p.family_) {
    case Family::Constant: return 0.0;
    case Family::PowerPlateau:
    case Family::PowerCusp:
    case Family::MinOfCusps:
    case Family::PowerLog: return 1.0 / p.gamma_;
    case Family::Cantor: return (1.0 - std::log(2.0) / std::log(3.0)) / p.gamma_;
    case Family::Custom: return p.declared_sigma_;
  }
  return 0.0;
}

LevelMeasureFit fit_sigma_phi(const HurstProfile& profile, double s_lo, double s_hi, std::size_t samples) {
  if (!(s_lo > 0.0 && s_hi > s_lo) || samples < 3) throw DomainError("fit_sigma_phi: need 0 < s_lo < s_hi and 3+ samples");
  std::vector<double> grid(samples);
  const double a = std::log(s_lo), b = std::log(s_hi);
  for (std::size_t i = 0; i < samples; ++i)
    grid[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(samples - 1));
  return fit_sigma_phi(profile, grid);
}

LevelMeasureFit fit_sigma_phi(const HurstProfile& profile, const std::vector<double>& s_grid) {
  if (s_grid.size() < 3) throw DomainError("fit_sigma_phi: need at least 3 levels");
  std::vector<double> s = s_grid;
  std::sort(s.begin(), s.end());
  if (!(s.front() > 0.0) || !(s.back() < 1.0)) throw DomainError("fit_sigma_phi: levels must lie in (0, 1)");
  if (s.back() / s.front() < 100.0) throw DomainError("fit_sigma_phi: levels must span at least two decades");

  const std::size_t n = s.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(s[i]);
    y[i] = log_level_measure(profile, s[i]);
    if (!std::isfinite(y[i])) throw FitQualityError("fit_sigma_phi: empty small-values set", 0.0);
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < n; ++i) worst = std::max(worst, y[i - 1] - y[i]);
  if (worst > 1e-12) throw FitQualityError("fit_sigma_phi: level measure is not monotone in s", worst);

  const double xm = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  LevelMeasureFit fit;
  fit.fitted_sigma = sxy / sxx;
  fit.s_lo = s.front();
  fit.s_hi = s.back();
  for (std::size_t i = 0; i < n; ++i)
    fit.residual = std::max(fit.residual, std::abs(y[i] - ym - fit.fitted_sigma * (x[i] - xm)));
  const double known = declared_sigma(profile);
  fit.sigma = known > 0.0 ? known : fit.fitted_sigma;

  // log phi against log log(1/s), sigma held fixed.
  std::vector<double> u(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::log(-x[i]);
    v[i] = y[i] - fit.sigma * x[i];
    fit.phi_samples.emplace_back(s[i], std::exp(v[i]));
  }
  const double um = std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(n);
  const double vm = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  double suu = 0.0, suv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    suu += (u[i] - um) * (u[i] - um);
    suv += (u[i] - um) * (v[i] - vm);
  }
  fit.log_exponent = suv / suu;
  return fit;
}

double distance_to_minimum(const HurstProfile& p, double x) {
  switch (p.family()) {
    case Family::Constant: return 0.0;
    case Family::PowerPlateau: return std::max(0.0, x - p.x0());
    case Family::PowerCusp:
    case Family::PowerLog: return std::abs(x - p.x0());
    case Family::MinOfCusps: {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& c : p.cusps()) d = std::min(d, std::abs(x - c.x0));
      return d;
    }
    case Family::Cantor: return cantor_distance(x, p.depth());
    case Family::Custom: {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& iv : minimum_info(p).set) {
        if (x >= iv.lo && x <= iv.hi) return 0.0;
        d = std::min({d, std::abs(x - iv.lo), std::abs(x - iv.hi)});
      }
      return d;
    }
  }
  return 0.0;
}

double regularized_distance(const HurstProfile& p, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("regularized_distance: x must lie in [0, 1]");
  if (p.family() != Family::Cantor) return distance_to_minimum(p, x);
  const double d = cantor_distance(x, p.depth());
  if (d == 0.0) return 0.0;
  // Gaussian average of the distance at a scale proportional to the distance itself.
  static const quad::Rule rule = quad::gauss_hermite(16);
  const double scale = 0.25 * d * std::sqrt(2.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.weights[i] * cantor_distance(x + scale * rule.nodes[i], p.depth());
  return acc / std::sqrt(std::acos(-1.0));
}

std::function<double(double)> slowly_varying_factor(const HurstProfile& p) {
  switch (p.family()) {
    case Family::Constant: return [](double) { return 0.0; };
    case Family::PowerPlateau: {
      const double c = p.x0() < 1.0 ? 1.0 : 0.0;
      return [c](double) { return c; };
    }
    case Family::PowerCusp: {
      const double c = sides(p.x0());
      return [c](double) { return c; };
    }
    case Family::MinOfCusps: {
      double c = 0.0;
      for (const auto& cusp : p.cusps())
        if (cusp.gamma >= p.gamma() * (1.0 - 1e-12)) c += sides(cusp.x0);
      return [c](double) { return c; };
    }
    case Family::PowerLog: {
      const double e = p.log_power() / p.gamma();
      const double c = 2.0 * std::pow(p.gamma(), e);
      return [c, e](double y) {
        if (!(y > 1.0)) throw DomainError("slowly varying factor: argument must exceed 1");
        return c * std::pow(std::log(y), -e);
      };
    }
    case Family::Cantor:
      throw NotCoveredError("cantor profile: the small-values measure is not regularly varying (periodic factor)");
    case Family::Custom: throw DomainError("custom profile: build the slowly varying factor from a level-measure fit");
  }
  return [](double) { return 0.0; };
}

std::function<double(double)> slowly_varying_factor(const LevelMeasureFit& fit) {
  if (fit.phi_samples.empty()) throw DomainError("slowly varying factor: fit has no samples");
  std::vector<std::pair<double, double>> pts;  // (log s, phi), ascending in log s
  for (const auto& [s, phi] : fit.phi_samples) pts.emplace_back(std::log(s), phi);
  std::sort(pts.begin(), pts.end());
  return [pts](double y) {
    const double ls = -std::log(y);
    if (ls <= pts.front().first) return pts.front().second;
    if (ls >= pts.back().first) return pts.back().second;
    auto it = std::upper_bound(pts.begin(), pts.end(), ls, [](double v, const auto& q) { return v < q.first; });
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (y1 - y0) * (ls - x0) / (x1 - x0);
  };
}

}  // namespace varhurst
