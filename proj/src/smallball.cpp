#include "varhurst/smallball.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "varhurst/errors.hpp"
#include "varhurst/quadrature.hpp"

namespace varhurst {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------------------------
// Inversion integral through the tilted contour.

// sum lambda / (1 + 2 c lambda) and its derivative in c.
std::pair<double, double> tilted_mean(const EigenSequence& seq, double c) {
  double f = 0.0, df = 0.0;
  seq.for_each([&](double l) {
    const double m = l / (1.0 + 2.0 * c * l);
    f += m;
    df -= 2.0 * m * m;
  });
  return {f, df};
}

// Root of sum lambda / (1 + 2 c lambda) = r on (-1/(2 lambda_1), inf): safeguarded Newton.
double solve_tilt(const EigenSequence& seq, double r, double mean, double lambda_max) {
  double lo, hi;
  if (r < mean) {
    lo = 0.0;
    hi = 1.0 / r;
    while (tilted_mean(seq, hi).first > r) {
      lo = hi;
      hi *= 4.0;
      if (hi > 1e300) throw DomainError("saddlepoint: tilting parameter overflow");
    }
  } else {
    lo = -0.5 / lambda_max;
    hi = 0.0;
  }
  double c = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const auto [f, df] = tilted_mean(seq, c);
    const double g = f - r;
    if (g > 0.0) lo = c; else hi = c;
    double next = c - g / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - c) <= 1e-15 * std::abs(c) || hi - lo <= 1e-15 * std::max(std::abs(lo), std::abs(hi))) {
      c = next;
      break;
    }
    c = next;
  }
  return c;
}

// log(1 + i x) for real x, accurate for small x.
std::complex<double> log1p_i(double x) { return {0.5 * std::log1p(x * x), std::atan(x)}; }

class InversionIntegrand {
 public:
  InversionIntegrand(const EigenSequence& seq, double c, double r) : seq_(seq), c_(c), r_(r) {
    seq.for_each([&](double l) {
      const double m = l / (1.0 + 2.0 * c * l);
      sum_mu2_ += m * m;
    });
  }

  double scale() const { return 1.0 / std::sqrt(sum_mu2_); }

  // Stores mu_1..mu_M explicitly and the power sums of the rest, normalized by mu_{M+1}.
  void set_head(std::size_t M) {
    M = std::min(M, seq_.size());
    head_.resize(M);
    for (std::size_t i = 0; i < M; ++i) head_[i] = mu(seq_[i]);
    power_.assign(kPowers, 0.0);
    tail_max_ = M < seq_.size() ? mu(seq_[M]) : 0.0;
    std::size_t i = 0;
    seq_.for_each([&](double l) {
      if (i++ < M) return;
      const double q = mu(l) / tail_max_;
      double p = q;
      for (std::size_t j = 0; j < kPowers && p > 1e-300; ++j) {
        power_[j] += p;
        p *= q;
      }
    });
  }

  std::size_t head_size() const { return head_.size(); }
  double tail_max() const { return tail_max_; }
  bool has_tail() const { return head_.size() < seq_.size(); }

  // Upper bound on |integrand| from the stored head.
  double bound(double u) const {
    double s = 0.0;
    for (double m : head_) s += std::log1p(4.0 * u * u * m * m);
    return std::exp(-0.25 * s) / std::hypot(c_, u);
  }

  double operator()(double u) const {
    std::complex<double> L(0.0, 0.0);
    for (double m : head_) L += log1p_i(2.0 * u * m);
    if (has_tail()) {
      const std::complex<double> z(0.0, 2.0 * u * tail_max_);
      std::complex<double> zp = z;
      std::complex<double> series(0.0, 0.0);
      for (std::size_t j = 0; j < kPowers; ++j) {
        const std::complex<double> term = zp * (power_[j] / static_cast<double>(j + 1));
        series += (j % 2 == 0) ? term : -term;
        if (std::abs(term) <= 1e-18 * std::abs(series)) break;
        zp *= z;
      }
      L += series;
    }
    const std::complex<double> e(-0.5 * L.real(), u * r_ - 0.5 * L.imag());
    return (std::exp(e) / std::complex<double>(c_, u)).real();
  }

 private:
  static constexpr std::size_t kPowers = 64;
  double mu(double l) const { return l / (1.0 + 2.0 * c_ * l); }

  const EigenSequence& seq_;
  double c_, r_;
  double sum_mu2_ = 0.0;
  std::vector<double> head_;
  std::vector<double> power_;
  double tail_max_ = 0.0;
};

double gl_panel(const InversionIntegrand& f, double a, double b) {
  const quad::Rule& rule = quad::cached_gauss_legendre(20);
  const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * f(mid + h * rule.nodes[i]);
  return h * s;
}

// Wynn epsilon algorithm; returns the last even-column estimate.
double wynn_limit(const std::vector<double>& s) {
  const std::size_t n = s.size();
  std::vector<std::vector<double>> eps(n + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) eps[i][1] = s[i];
  double best = s.back();
  for (std::size_t k = 2; k <= n; ++k) {
    for (std::size_t i = 0; i + k <= n; ++i) {
      const double d = eps[i + 1][k - 1] - eps[i][k - 1];
      if (d == 0.0) return best;
      eps[i][k] = eps[i + 1][k - 2] + 1.0 / d;
    }
    if (k % 2 == 1) best = eps[n - k][k];
  }
  return best;
}

// (1/pi) * integral over u > 0 of the tilted inversion integrand.
double inversion_integral(const EigenSequence& seq, double c, double r, double curvature) {
  InversionIntegrand f(seq, c, r);
  const double scale = f.scale();
  const double j_est = 1.0 / (std::abs(c) * std::sqrt(2.0 * kPi * curvature));
  const double tol = 1e-15 * j_est;

  // Grow the explicit head until the power series of the rest converges out to the cut.
  std::size_t M = std::min<std::size_t>(64, seq.size());
  double u_cut = scale;
  for (;;) {
    f.set_head(M);
    u_cut = scale;
    while (f.bound(u_cut) > tol && u_cut < 1e300) u_cut *= 2.0;
    if (!f.has_tail() || 2.0 * u_cut * f.tail_max() <= 0.5) break;
    M = std::min(2 * M, seq.size());
  }

  const double period = kPi / r;
  const double width = std::min(0.5 * scale, period);
  constexpr double kMaxPanels = 20000.0;
  if (u_cut / width <= kMaxPanels) {
    double total = 0.0;
    for (double a = 0.0; a < u_cut; a += width) total += gl_panel(f, a, std::min(a + width, u_cut));
    return total / kPi;
  }
  // Slow algebraic decay (few eigenvalues): half-period panels and Wynn acceleration.
  const double u0 = period * std::ceil(std::max(16.0 * scale, 4.0 * period) / period);
  double head = 0.0;
  for (double a = 0.0; a < u0; a += width) head += gl_panel(f, a, std::min(a + width, u0));
  std::vector<double> partial;
  double acc = head;
  double a = u0;
  for (int k = 0; k < 40; ++k) {
    acc += gl_panel(f, a, a + period);
    a += period;
    partial.push_back(acc);
  }
  return wynn_limit(partial) / kPi;
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// EigenSequence

std::size_t EigenSequence::size() const noexcept {
  return head.size() + (tail && tail_last >= tail_first ? tail_last - tail_first + 1 : 0);
}

double EigenSequence::operator[](std::size_t i) const {
  if (i < head.size()) return head[i];
  return scale * tail(static_cast<double>(tail_first + (i - head.size())));
}

void EigenSequence::for_each(const std::function<void(double)>& f) const {
  for (double v : head) f(v);
  if (!tail) return;
  for (std::size_t k = tail_first; k <= tail_last && tail_last >= tail_first; ++k) f(scale * tail(static_cast<double>(k)));
}

double EigenSequence::sum() const {
  // Smallest values first.
  double s = 0.0;
  if (tail)
    for (std::size_t k = tail_last; k >= tail_first && k > 0; --k) s += scale * tail(static_cast<double>(k));
  for (auto it = head.rbegin(); it != head.rend(); ++it) s += *it;
  return s;
}

EigenSequence EigenSequence::from_values(std::vector<double> values) {
  EigenSequence seq;
  seq.head = std::move(values);
  return seq;
}

EigenSequence EigenSequence::from_function(std::function<double(double)> f, std::size_t first, std::size_t last) {
  if (first < 1 || last < first) throw DomainError("EigenSequence: need 1 <= first <= last");
  EigenSequence seq;
  seq.tail = std::move(f);
  seq.tail_first = first;
  seq.tail_last = last;
  return seq;
}

EigenSequence tail_completion(const Spectrum& spec, const std::optional<AsymptoticModel>& model, std::size_t N,
                              double max_mismatch) {
  const std::size_t K = spec.trusted_count;
  if (K == 0) throw DomainError("tail_completion: spectrum has no trusted singular values");
  if (N < K) throw DomainError("tail_completion: N must be at least the trusted count");
  EigenSequence seq;
  seq.head.reserve(K);
  for (std::size_t k = 0; k < K; ++k) seq.head.push_back(spec.singular_values[k] * spec.singular_values[k]);
  if (!model) {
    if (N != K) throw DomainError("tail_completion: a tail beyond the trusted count needs a model");
    return seq;
  }
  if (model->meas_d == 0.0 && K < 2) throw DomainError("tail_completion: splice needs K >= 2 when meas D = 0");
  const double raw = eigen_tail(*model, static_cast<double>(K));
  const double lambda_k = seq.head.back();
  seq.scale = lambda_k / raw;
  seq.mismatch = std::abs(seq.scale - 1.0);
  seq.model = model;
  if (seq.mismatch > max_mismatch)
    throw SpliceError("tail_completion: splice mismatch " + std::to_string(seq.mismatch) + " exceeds " +
                          std::to_string(max_mismatch),
                      seq.mismatch);
  if (N > K) {
    const AsymptoticModel m = *model;
    seq.tail = [m](double k) { return eigen_tail(m, k); };
    seq.tail_first = K + 1;
    seq.tail_last = N;
  }
  return seq;
}

EigenSequence synthetic_sequence(const AsymptoticModel& model, std::size_t N) {
  const std::size_t first = model.meas_d > 0.0 ? 1 : 2;
  if (N < first) throw DomainError("synthetic_sequence: N too small");
  EigenSequence seq = EigenSequence::from_function([model](double k) { return eigen_tail(model, k); }, first, N);
  seq.model = model;
  return seq;
}

// ---------------------------------------------------------------------------------------------
// Saddle point

SaddleResult saddlepoint(const EigenSequence& seq, double epsilon, SaddleMethod method) {
  if (!(epsilon > 0.0)) throw DomainError("saddlepoint: epsilon must be positive");
  if (seq.size() == 0) throw DomainError("saddlepoint: empty eigenvalue sequence");
  double mean = 0.0, var = 0.0, lambda_max = 0.0;
  seq.for_each([&](double l) {
    if (!(l > 0.0)) throw DomainError("saddlepoint: eigenvalues must be positive");
    mean += l;
    var += 2.0 * l * l;
    lambda_max = std::max(lambda_max, l);
  });
  const double r = epsilon * epsilon;
  SaddleResult res;
  double c = solve_tilt(seq, r, mean, lambda_max);
  // Near the mean the pole at zero dominates; move the contour off it.
  const double sd = std::sqrt(var);
  if (std::abs(c) * sd < 1.0) c = r < mean ? 1.0 / sd : -std::min(1.0 / sd, 0.25 / lambda_max);
  res.gamma = c;
  res.complementary = c < 0.0;

  double logdet = 0.0, curv = 0.0;
  seq.for_each([&](double l) {
    logdet += std::log1p(2.0 * c * l);
    const double m = l / (1.0 + 2.0 * c * l);
    curv += 2.0 * m * m;
  });
  res.log_mgf = c * r - 0.5 * logdet;
  res.curvature = curv;

  if (method == SaddleMethod::Gaussian) {
    const double lead = res.log_mgf - 0.5 * std::log(2.0 * kPi * c * c * curv);
    res.log_p = res.complementary ? std::log1p(-std::exp(lead)) : lead;
    return res;
  }
  const double J = inversion_integral(seq, c, r, curv);
  if (!res.complementary) {
    if (!(J > 0.0)) throw QuadratureError("saddlepoint: nonpositive inversion integral", J, 0.0);
    res.log_p = res.log_mgf + std::log(J);
  } else {
    const double q = std::exp(res.log_mgf) * J;
    if (!(q > -1.0)) throw QuadratureError("saddlepoint: complementary probability out of range", q, 0.0);
    res.log_p = std::log1p(q);
  }
  return res;
}

double saddlepoint_logP(const EigenSequence& seq, double epsilon, SaddleMethod method) {
  return saddlepoint(seq, epsilon, method).log_p;
}

// ---------------------------------------------------------------------------------------------
// Monte Carlo

PathSample simulate_paths(const CovarianceSpec& spec, std::size_t grid_n, std::size_t n_paths, std::uint64_t seed) {
  if (grid_n < 2) throw DomainError("simulate_paths: grid_n must be at least 2");
  PathSample out;
  out.grid.resize(grid_n);
  for (std::size_t i = 0; i < grid_n; ++i) out.grid[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(grid_n);
  const Eigen::MatrixXd G = covariance_gram(spec, out.grid);
  const double mean_diag = G.diagonal().mean();
  Eigen::MatrixXd L;
  bool ok = false;
  for (double jitter : {0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8}) {
    Eigen::MatrixXd A = G;
    A.diagonal().array() += jitter * mean_diag;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
      L = llt.matrixL();
      out.jitter = jitter;
      ok = true;
      break;
    }
  }
  if (!ok) throw PsdError("simulate_paths: Gram matrix not positive definite after jitter 1e-8");

  std::mt19937_64 gen(seed);
  auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  Eigen::MatrixXd Z(n_paths, grid_n);
  bool have_spare = false;
  double spare = 0.0;
  for (std::size_t p = 0; p < n_paths; ++p) {
    for (std::size_t j = 0; j < grid_n; ++j) {
      if (have_spare) {
        Z(p, j) = spare;
        have_spare = false;
        continue;
      }
      const double u1 = 1.0 - uniform();  // (0, 1]
      const double u2 = uniform();
      const double rad = std::sqrt(-2.0 * std::log(u1));
      Z(p, j) = rad * std::cos(2.0 * kPi * u2);
      spare = rad * std::sin(2.0 * kPi * u2);
      have_spare = true;
    }
  }
  out.paths = Z * L.transpose();
  return out;
}

McEstimate mc_smallball(const PathSample& sample, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("mc_smallball: epsilon must be positive");
  const auto n_paths = static_cast<std::size_t>(sample.paths.rows());
  if (n_paths == 0) throw DomainError("mc_smallball: no paths");
  const double grid_n = static_cast<double>(sample.paths.cols());
  const double r = epsilon * epsilon;
  McEstimate est;
  est.n_paths = n_paths;
  for (std::size_t p = 0; p < n_paths; ++p)
    if (sample.paths.row(static_cast<Eigen::Index>(p)).squaredNorm() / grid_n <= r) ++est.hits;
  const double n = static_cast<double>(n_paths);
  const double z = 1.959963984540054;
  const double p = static_cast<double>(est.hits) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  est.p_hat = p;
  est.lo = std::max(0.0, centre - half);
  est.hi = std::min(1.0, centre + half);
  if (est.hits == 0) {
    est.upper_bound_only = true;
    est.lo = 0.0;
  }
  return est;
}

// ---------------------------------------------------------------------------------------------
// Comparison harness

SmallBallReport compare(const HurstProfile& profile, Process process, const std::vector<double>& eps_grid,
                        const CompareConfig& config) {
  SmallBallReport report;
  if (eps_grid.empty()) return report;
  if (process == Process::FBM && profile.family() != Family::Constant)
    throw DomainError("compare: fbm needs a constant profile");
  const AsymptoticModel model = make_model(profile, process);
  report.regime = model.meas_d > 0.0 ? Regime::PositiveMeasureD : Regime::ZeroMeasureD;
  std::vector<SmallBallPrediction> predictions;
  for (double eps : eps_grid) predictions.push_back(smallball_prediction(model, eps));

  EigenSequence seq;
  if (config.synthetic) {
    seq = synthetic_sequence(model, config.tail_n);
  } else {
    const CovarianceSpec cov = process == Process::FBM    ? CovarianceSpec::fbm(profile(0.0))
                               : process == Process::MBM ? CovarianceSpec::mbm(profile)
                                                         : CovarianceSpec::mfbm(profile);
    std::function<Spectrum(std::size_t)> run;
    switch (config.method) {
      case SpectrumMethod::NystromEig:
        run = [&cov](std::size_t n) { return nystrom_eigs(build_covariance_matrix(cov, n)); };
        break;
      case SpectrumMethod::VolterraSVD:
        if (process != Process::MFBM) throw DomainError("compare: the volterra route needs the mfbm process");
        run = [&profile](std::size_t n) { return volterra_svd(profile, n); };
        break;
      case SpectrumMethod::PsidoSVD:
        throw DomainError("compare: the psido route has no small-ball interpretation");
    }
    const Spectrum spec = converged_spectrum(run, config.n);
    seq = tail_completion(spec, model, std::max(config.tail_n, spec.trusted_count), config.max_mismatch);
  }
  report.mismatch = seq.mismatch;
  report.head_size = seq.head.size();
  report.tail_n = seq.size();

  std::optional<PathSample> sample;
  if (config.mc_paths > 0) {
    const CovarianceSpec cov = process == Process::FBM    ? CovarianceSpec::fbm(profile(0.0))
                               : process == Process::MBM ? CovarianceSpec::mbm(profile)
                                                         : CovarianceSpec::mfbm(profile);
    sample = simulate_paths(cov, config.mc_grid, config.mc_paths, config.seed);
  }

  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    SmallBallRow row;
    row.epsilon = eps_grid[i];
    row.oracle_log_p = saddlepoint_logP(seq, eps_grid[i], config.saddle);
    row.prediction_log_p = predictions[i].log_p;
    row.ratio = std::isfinite(row.oracle_log_p) && std::isfinite(row.prediction_log_p) && row.prediction_log_p != 0.0
                    ? row.oracle_log_p / row.prediction_log_p
                    : kNaN;
    if (sample) row.mc = mc_smallball(*sample, eps_grid[i]);
    report.rows.push_back(row);
  }
  return report;
}

void write_report_csv(std::ostream& os, const SmallBallReport& report) {
  const auto old = os.precision(17);
  os << "epsilon,oracle_log_p,prediction_log_p,ratio,mc_p,mc_lo,mc_hi\n";
  for (const auto& row : report.rows) {
    os << row.epsilon << ',' << row.oracle_log_p << ',' << row.prediction_log_p << ',' << row.ratio;
    if (row.mc) os << ',' << row.mc->p_hat << ',' << row.mc->lo << ',' << row.mc->hi << '\n';
    else os << ",,,\n";
  }
  os.precision(old);
}

}  // namespace varhurst
