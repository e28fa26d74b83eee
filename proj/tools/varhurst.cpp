#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "varhurst/asymptotics.hpp"
#include "varhurst/config.hpp"
#include "varhurst/errors.hpp"
#include "varhurst/hurst.hpp"
#include "varhurst/smallball.hpp"
#include "varhurst/spectrum.hpp"

namespace {

using namespace varhurst;
using nlohmann::json;

enum Exit { kOk = 0, kInternal = 1, kDomain = 2, kRange = 3, kNotCovered = 4 };

// Rows of json cells (numbers, strings or null), written as CSV or as an array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_table(std::ostream& os, const Table& t, const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i) {
        const json& cell = row[i];
        obj[t.columns[i]] = cell.is_number_float() && !std::isfinite(cell.get<double>()) ? json() : cell;
      }
      arr.push_back(obj);
    }
    os << arr.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      const json& cell = row[i];
      if (cell.is_null()) continue;
      if (cell.is_number_float()) os << format_number(cell.get<double>());
      else if (cell.is_number()) os << cell.dump();
      else if (cell.is_boolean()) os << (cell.get<bool>() ? 1 : 0);
      else os << cell.get<std::string>();
    }
    os << '\n';
  }
}

void emit(const Table& t, const ExperimentConfig& c) {
  if (c.format != "csv" && c.format != "json") throw ConfigError("unknown format '" + c.format + "' (csv, json)");
  if (c.out.empty() || c.out == "-") {
    write_table(std::cout, t, c.format);
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw ConfigError("cannot write '" + c.out + "'");
  write_table(f, t, c.format);
  if (!f) throw ConfigError("write failed for '" + c.out + "'");
}

CovarianceSpec covariance_for(const HurstProfile& profile, Process process) {
  switch (process) {
    case Process::FBM:
      if (profile.family() != Family::Constant) throw ConfigError("process fbm needs a constant profile");
      return CovarianceSpec::fbm(profile(0.0));
    case Process::MBM: return CovarianceSpec::mbm(profile);
    case Process::MFBM: return CovarianceSpec::mfbm(profile);
  }
  throw ConfigError("unknown process");
}

PsidoOptions psido_options(const ExperimentConfig& c) {
  PsidoOptions opt;
  opt.m = c.psido_m;
  opt.a0 = c.psido_a0;
  opt.n_x = c.n;
  opt.xi_max = c.xi_max;
  opt.n_xi = c.n_xi;
  return opt;
}

Spectrum run_spectrum(const ExperimentConfig& c, const HurstProfile& profile) {
  const SpectrumMethod method = parse_method(c.method);
  std::function<Spectrum(std::size_t)> run;
  if (method == SpectrumMethod::PsidoSVD) {
    const PsidoOptions base = psido_options(c);
    run = [base, &profile](std::size_t n) {
      PsidoOptions opt = base;
      opt.n_x = n;
      return psido_svd(profile, opt);
    };
  } else {
    const Process process = parse_process(c.process);
    if (method == SpectrumMethod::VolterraSVD) {
      if (process != Process::MFBM) throw ConfigError("method volterra needs process mfbm");
      covariance_for(profile, process);
      run = [&profile](std::size_t n) { return volterra_svd(profile, n); };
    } else {
      const CovarianceSpec cov = covariance_for(profile, process);
      run = [cov](std::size_t n) { return nystrom_eigs(build_covariance_matrix(cov, n)); };
    }
  }
  return converged_spectrum(run, c.n, c.rel_tol);
}

std::vector<double> default_t_grid(const Spectrum& spec) {
  double top = spec.max_admissible_t();
  if (spec.truncation_t > 0.0) top = std::min(top, spec.truncation_t);
  const double lo = std::min(5.0, 0.5 * top);
  return parse_grid(format_number(lo) + ":" + format_number(0.999 * top) + ":12");
}

int cmd_spectrum(const ExperimentConfig& c) {
  const HurstProfile profile = parse_profile(c.hurst);
  const Spectrum spec = run_spectrum(c, profile);
  Table t{{"k", "s_k", "lambda_k", "trusted"}, {}};
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double s = spec.singular_values[k];
    t.rows.push_back({json(k + 1), json(s), json(s * s), json(k < spec.trusted_count ? 1 : 0)});
  }
  emit(t, c);
  return kOk;
}

int cmd_counting(const ExperimentConfig& c) {
  const HurstProfile profile = parse_profile(c.hurst);
  const Process process = parse_process(c.process);
  const AsymptoticModel model = make_model(profile, process);
  if (c.method == "psido") throw ConfigError("counting uses nystrom or volterra; see the psido command");
  const Spectrum spec = run_spectrum(c, profile);
  const std::vector<double> grid = c.t_grid.empty() ? default_t_grid(spec) : c.t_grid;
  Table t{{"t", "N_numeric", "N_theorem1", "N_laplace2", "ratio"}, {}};
  for (double tv : grid) {
    const double numeric = static_cast<double>(counting(spec, tv));
    const double theorem = theorem1_counting(model, profile, tv);
    json laplace;
    if (std::log(tv) > 1.0) {
      const LaplaceTerms lt = laplace_two_term(model, tv);
      laplace = model.prefactor * (lt.leading + lt.second);
    }
    t.rows.push_back({json(tv), json(numeric), json(theorem), laplace, json(numeric / theorem)});
  }
  emit(t, c);
  return kOk;
}

int cmd_psido(const ExperimentConfig& c) {
  const HurstProfile profile = parse_profile(c.hurst);
  ExperimentConfig cc = c;
  cc.method = "psido";
  const Spectrum spec = run_spectrum(cc, profile);
  const AsymptoticModel model = make_psido_model(profile, c.psido_m, c.psido_a0);
  const std::vector<double> grid = c.t_grid.empty() ? default_t_grid(spec) : c.t_grid;
  Table t{{"t", "N_numeric", "N_theorem", "ratio"}, {}};
  for (double tv : grid) {
    const double numeric = static_cast<double>(counting(spec, tv));
    const double theorem = theorem1_counting(model, profile, tv);
    t.rows.push_back({json(tv), json(numeric), json(theorem), json(numeric / theorem)});
  }
  emit(t, c);
  return kOk;
}

int cmd_smallball(const ExperimentConfig& c) {
  const HurstProfile profile = parse_profile(c.hurst);
  const Process process = parse_process(c.process);
  CompareConfig cfg;
  cfg.n = c.n;
  cfg.method = parse_method(c.method);
  cfg.tail_n = c.tail_n;
  cfg.synthetic = c.synthetic_tail;
  cfg.max_mismatch = c.max_mismatch;
  if (c.saddle == "exact") cfg.saddle = SaddleMethod::Exact;
  else if (c.saddle == "gaussian") cfg.saddle = SaddleMethod::Gaussian;
  else throw ConfigError("unknown saddle method '" + c.saddle + "' (exact, gaussian)");
  cfg.mc_paths = c.mc_paths;
  cfg.mc_grid = c.mc_grid;
  cfg.seed = c.seed;
  const std::vector<double> grid = c.eps_grid.empty() ? std::vector<double>{0.1, 0.05, 0.02, 0.01} : c.eps_grid;
  const SmallBallReport report = compare(profile, process, grid, cfg);
  Table t{{"epsilon", "oracle_log_p", "prediction_log_p", "ratio", "mc_p", "mc_lo", "mc_hi"}, {}};
  for (const auto& row : report.rows) {
    std::vector<json> cells{json(row.epsilon), json(row.oracle_log_p), json(row.prediction_log_p), json(row.ratio)};
    if (row.mc) {
      cells.push_back(row.mc->p_hat);
      cells.push_back(row.mc->lo);
      cells.push_back(row.mc->hi);
    } else {
      cells.insert(cells.end(), 3, json());
    }
    t.rows.push_back(std::move(cells));
  }
  emit(t, c);
  return kOk;
}

int cmd_hurst(const ExperimentConfig& c) {
  const HurstProfile profile = parse_profile(c.hurst);
  const std::vector<double> grid = c.s_grid.empty() ? parse_grid("1e-6:1e-2:64") : c.s_grid;
  const LevelMeasureFit fit = fit_sigma_phi(profile, grid);
  const MinimumInfo info = minimum_info(profile);
  Table t{{"s", "level_measure", "sigma", "fitted_sigma", "phi", "log_exponent", "h_min", "meas_d"}, {}};
  for (const auto& [s, phi] : fit.phi_samples) {
    t.rows.push_back({json(s), json(level_measure(profile, s)), json(fit.sigma), json(fit.fitted_sigma), json(phi),
                      json(fit.log_exponent), json(info.h_min), json(info.meas_d)});
  }
  emit(t, c);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  ExperimentConfig cfg;
  std::string t_grid, eps_grid, s_grid, config_path;
  bool show_explain = false;

  CLI::App app{"Spectra and small-ball probabilities of variable-Hurst Gaussian processes"};
  app.require_subcommand(1);
  app.add_option("--process", cfg.process, "fbm | mbm | mfbm")->capture_default_str();
  app.add_option("--hurst", cfg.hurst, "family:params or @file.json")->capture_default_str();
  app.add_option("--n", cfg.n, "discretization size")->capture_default_str();
  app.add_option("--method", cfg.method, "nystrom | volterra | psido")->capture_default_str();
  app.add_option("--rel-tol", cfg.rel_tol, "n vs n/2 agreement defining the trusted range")->capture_default_str();
  app.add_option("--t-grid", t_grid, "comma list or a:b:count");
  app.add_option("--eps-grid", eps_grid, "comma list or a:b:count");
  app.add_option("--s-grid", s_grid, "comma list or a:b:count");
  app.add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--out", cfg.out, "output path (stdout if empty)");
  app.add_option("--format", cfg.format, "csv | json")->capture_default_str();
  app.add_option("--config", config_path, "JSON file whose keys override the flags");
  app.add_flag("--explain", show_explain, "print the resolved configuration to stderr");
  app.add_flag("--synthetic-tail", cfg.synthetic_tail, "small-ball oracle on the asymptotic sequence only");
  app.add_option("--tail-n", cfg.tail_n, "last index of the synthesized tail")->capture_default_str();
  app.add_option("--max-mismatch", cfg.max_mismatch, "largest accepted splice mismatch")->capture_default_str();
  app.add_option("--saddle", cfg.saddle, "exact | gaussian")->capture_default_str();
  app.add_option("--mc-paths", cfg.mc_paths, "Monte Carlo paths (0 disables)")->capture_default_str();
  app.add_option("--mc-grid", cfg.mc_grid, "Monte Carlo grid size")->capture_default_str();
  app.add_option("--m", cfg.psido_m, "base order of the pseudodifferential operator")->capture_default_str();
  app.add_option("--a0", cfg.psido_a0, "multiplier a(0)")->capture_default_str();
  app.add_option("--xi-max", cfg.xi_max, "frequency cut-off (0: 4 pi n)")->capture_default_str();
  app.add_option("--n-xi", cfg.n_xi, "frequency nodes (0: 8 n)")->capture_default_str();

  const std::vector<std::pair<std::string, std::string>> commands{
      {"spectrum", "singular values k, s_k, lambda_k, trusted"},
      {"counting", "numeric counting function against the one-term prediction"},
      {"smallball", "small-ball oracle against the logarithmic prediction"},
      {"hurst", "level measure of the profile and its regular-variation fit"},
      {"psido", "counting function of the variable-order pseudodifferential operator"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kDomain;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    if (!t_grid.empty()) cfg.t_grid = parse_grid(t_grid);
    if (!eps_grid.empty()) cfg.eps_grid = parse_grid(eps_grid);
    if (!s_grid.empty()) cfg.s_grid = parse_grid(s_grid);
    if (!config_path.empty()) apply_config_file(config_path, cfg);
    if (show_explain) std::cerr << explain(cfg) << '\n';
    if (cfg.command == "spectrum") return cmd_spectrum(cfg);
    if (cfg.command == "counting") return cmd_counting(cfg);
    if (cfg.command == "smallball") return cmd_smallball(cfg);
    if (cfg.command == "hurst") return cmd_hurst(cfg);
    if (cfg.command == "psido") return cmd_psido(cfg);
    return kInternal;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << "\nmax admissible t: " << format_number(e.max_admissible()) << '\n';
    return kRange;
  } catch (const TruncationError& e) {
    std::cerr << "error: " << e.what() << "\nrequired xi_max: " << format_number(e.required_xi_max()) << '\n';
    return kRange;
  } catch (const SpliceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRange;
  } catch (const NotCoveredError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNotCovered;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const ConsistencyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const FitQualityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}
