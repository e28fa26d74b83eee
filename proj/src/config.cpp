#include "varhurst/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace varhurst {

namespace {

using nlohmann::json;

double to_double(const std::string& text) {
  const char* first = text.data();
  const char* last = first + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last) throw ConfigError("not a number: '" + text + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::vector<double> numbers(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  for (const auto& p : split(text, ',')) out.push_back(to_double(p));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void arity(const std::string& family, const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (v.size() < lo || v.size() > hi)
    throw ConfigError(family + ": expected " + std::to_string(lo) + (lo == hi ? "" : "-" + std::to_string(hi)) +
                      " parameters, got " + std::to_string(v.size()));
}

double get(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

double need(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("profile: missing '") + key + "'");
  return j.at(key).get<double>();
}

HurstProfile profile_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family")) throw ConfigError("profile: JSON object with 'family' expected");
  const std::string family = j.at("family").get<std::string>();
  const double base = get(j, "base", 0.5);
  if (family == "constant") return HurstProfile::constant(j.contains("H") ? j.at("H").get<double>() : base);
  if (family == "power_plateau") return HurstProfile::power_plateau(need(j, "x0"), need(j, "gamma"), base);
  if (family == "power_cusp") return HurstProfile::power_cusp(need(j, "x0"), need(j, "gamma"), base);
  if (family == "power_log") return HurstProfile::power_log(need(j, "x0"), need(j, "gamma"), need(j, "b"), base);
  if (family == "cantor")
    return HurstProfile::cantor(need(j, "gamma"), j.contains("depth") ? j.at("depth").get<int>() : 12, base);
  if (family == "min_of_cusps") {
    if (!j.contains("cusps") || !j.at("cusps").is_array()) throw ConfigError("min_of_cusps: 'cusps' array expected");
    std::vector<Cusp> cusps;
    for (const auto& c : j.at("cusps")) {
      if (!c.is_array() || c.size() != 2) throw ConfigError("min_of_cusps: each cusp is [x0, gamma]");
      cusps.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    return HurstProfile::min_of_cusps(std::move(cusps), base);
  }
  throw ConfigError("unknown profile family '" + family + "'");
}

std::vector<double> grid_from_json(const json& j) {
  if (j.is_string()) return parse_grid(j.get<std::string>());
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_number()) return {j.get<double>()};
  throw ConfigError("grid: string, number or array expected");
}

}  // namespace

HurstProfile parse_profile(const std::string& text) {
  if (text.empty()) throw ConfigError("empty profile");
  if (text[0] == '@') return profile_from_json_text(read_file(text.substr(1)));
  if (text[0] == '{') return profile_from_json_text(text);
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  const std::vector<double> v = numbers(colon == std::string::npos ? std::string() : text.substr(colon + 1));
  if (family == "constant") {
    arity(family, v, 1, 1);
    return HurstProfile::constant(v[0]);
  }
  if (family == "power_plateau" || family == "power_cusp") {
    arity(family, v, 2, 3);
    const double base = v.size() > 2 ? v[2] : 0.5;
    return family == "power_plateau" ? HurstProfile::power_plateau(v[0], v[1], base)
                                     : HurstProfile::power_cusp(v[0], v[1], base);
  }
  if (family == "power_log") {
    arity(family, v, 3, 4);
    return HurstProfile::power_log(v[0], v[1], v[2], v.size() > 3 ? v[3] : 0.5);
  }
  if (family == "cantor") {
    arity(family, v, 1, 3);
    const int depth = v.size() > 1 ? static_cast<int>(v[1]) : 12;
    if (v.size() > 1 && static_cast<double>(depth) != v[1]) throw ConfigError("cantor: depth must be an integer");
    return HurstProfile::cantor(v[0], depth, v.size() > 2 ? v[2] : 0.5);
  }
  if (family == "min_of_cusps") {
    if (v.size() < 2) throw ConfigError("min_of_cusps: at least one (x0, gamma) pair expected");
    std::vector<Cusp> cusps;
    for (std::size_t i = 0; i + 1 < v.size(); i += 2) cusps.push_back({v[i], v[i + 1]});
    return HurstProfile::min_of_cusps(std::move(cusps), v.size() % 2 == 1 ? v.back() : 0.5);
  }
  throw ConfigError("unknown profile family '" + family + "'");
}

HurstProfile profile_from_json_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("profile JSON: ") + e.what());
  }
  try {
    return profile_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("profile JSON: ") + e.what());
  }
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) throw ConfigError("grid: empty");
  if (text.find(':') == std::string::npos) return numbers(text);
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError("grid: expected a:b:count");
  const double a = to_double(parts[0]), b = to_double(parts[1]);
  const double count = to_double(parts[2]);
  if (!(a > 0.0 && b > 0.0)) throw ConfigError("grid: geometric range needs positive endpoints");
  if (!(count >= 1.0) || count != std::floor(count)) throw ConfigError("grid: count must be a positive integer");
  const auto n = static_cast<std::size_t>(count);
  std::vector<double> out(n);
  if (n == 1) return {a};
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a * std::pow(b / a, static_cast<double>(i) / static_cast<double>(n - 1));
  out.back() = b;
  return out;
}

Process parse_process(const std::string& name) {
  if (name == "fbm") return Process::FBM;
  if (name == "mbm") return Process::MBM;
  if (name == "mfbm") return Process::MFBM;
  throw ConfigError("unknown process '" + name + "' (fbm, mbm, mfbm)");
}

SpectrumMethod parse_method(const std::string& name) {
  if (name == "nystrom") return SpectrumMethod::NystromEig;
  if (name == "volterra") return SpectrumMethod::VolterraSVD;
  if (name == "psido") return SpectrumMethod::PsidoSVD;
  throw ConfigError("unknown method '" + name + "' (nystrom, volterra, psido)");
}

void apply_config_file(const std::string& path, ExperimentConfig& c) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config '" + path + "': object expected");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "hurst" || key == "profile") c.hurst = v.is_string() ? v.get<std::string>() : v.dump();
      else if (key == "process") c.process = v.get<std::string>();
      else if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "method") c.method = v.get<std::string>();
      else if (key == "rel_tol") c.rel_tol = v.get<double>();
      else if (key == "t_grid") c.t_grid = grid_from_json(v);
      else if (key == "eps_grid") c.eps_grid = grid_from_json(v);
      else if (key == "s_grid") c.s_grid = grid_from_json(v);
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "synthetic_tail") c.synthetic_tail = v.get<bool>();
      else if (key == "tail_n") c.tail_n = v.get<std::size_t>();
      else if (key == "max_mismatch") c.max_mismatch = v.get<double>();
      else if (key == "saddle") c.saddle = v.get<std::string>();
      else if (key == "mc_paths") c.mc_paths = v.get<std::size_t>();
      else if (key == "mc_grid") c.mc_grid = v.get<std::size_t>();
      else if (key == "m") c.psido_m = v.get<double>();
      else if (key == "a0") c.psido_a0 = v.get<double>();
      else if (key == "xi_max") c.xi_max = v.get<double>();
      else if (key == "n_xi") c.n_xi = v.get<std::size_t>();
      else throw ConfigError("config '" + path + "': unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
}

std::string explain(const ExperimentConfig& c) {
  json j;
  j["command"] = c.command;
  j["hurst"] = c.hurst;
  j["process"] = c.process;
  j["n"] = c.n;
  j["method"] = c.method;
  j["rel_tol"] = c.rel_tol;
  j["t_grid"] = c.t_grid;
  j["eps_grid"] = c.eps_grid;
  j["s_grid"] = c.s_grid;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["format"] = c.format;
  j["synthetic_tail"] = c.synthetic_tail;
  j["tail_n"] = c.tail_n;
  j["max_mismatch"] = c.max_mismatch;
  j["saddle"] = c.saddle;
  j["mc_paths"] = c.mc_paths;
  j["mc_grid"] = c.mc_grid;
  j["m"] = c.psido_m;
  j["a0"] = c.psido_a0;
  j["xi_max"] = c.xi_max;
  j["n_xi"] = c.n_xi;
  return j.dump(2);
}

}  // namespace varhurst
