#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varhurst/covariance.hpp"
#include "varhurst/errors.hpp"
#include "varhurst/hurst.hpp"
#include "varhurst/spectrum.hpp"

namespace varhurst {

/// Raised for malformed configuration text; reported like a domain error.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// "family:p1,p2,..." or "@file.json". Families:
///   constant:H | power_plateau:x0,gamma[,base] | power_cusp:x0,gamma[,base]
///   min_of_cusps:x1,g1,x2,g2,...[,base] | power_log:x0,gamma,b[,base] | cantor:gamma[,depth[,base]]
HurstProfile parse_profile(const std::string& text);
/// JSON object {"family": ..., "x0", "gamma", "b", "base", "depth", "H", "cusps": [[x, g], ...]}.
HurstProfile profile_from_json_text(const std::string& json_text);

/// Comma list "a,b,c" or geometric range "a:b:count".
std::vector<double> parse_grid(const std::string& text);

Process parse_process(const std::string& name);
SpectrumMethod parse_method(const std::string& name);

struct ExperimentConfig {
  std::string command;
  std::string hurst = "constant:0.5";
  std::string process = "mbm";
  std::size_t n = 1024;
  std::string method = "nystrom";
  double rel_tol = 1e-3;
  std::vector<double> t_grid;
  std::vector<double> eps_grid;
  std::vector<double> s_grid;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  // Small-ball options.
  bool synthetic_tail = false;
  std::size_t tail_n = 1000000;
  double max_mismatch = 0.25;
  std::string saddle = "exact";
  std::size_t mc_paths = 0;
  std::size_t mc_grid = 256;
  // Pseudodifferential options.
  double psido_m = 1.0;
  double psido_a0 = 1.0;
  double xi_max = 0.0;
  std::size_t n_xi = 0;
};

/// Overrides every field present in a JSON config file.
void apply_config_file(const std::string& path, ExperimentConfig& config);

/// Fully resolved configuration as pretty-printed JSON.
std::string explain(const ExperimentConfig& config);

}  // namespace varhurst
