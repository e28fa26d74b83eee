#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "varhurst/config.hpp"

using namespace varhurst;

TEST_CASE("profile strings") {
  CHECK(parse_profile("constant:0.7")(0.3) == doctest::Approx(0.7));
  const auto cusp = parse_profile("power_cusp:0.5,2,0.6");
  CHECK(cusp.family() == Family::PowerCusp);
  CHECK(cusp(0.5) == doctest::Approx(0.6));
  CHECK(cusp(1.0) == doctest::Approx(0.85));
  CHECK(parse_profile("power_plateau:0.3,2").family() == Family::PowerPlateau);
  CHECK(parse_profile("power_log:0.5,2,1").log_power() == 1.0);
  const auto cantor = parse_profile("cantor:1,8");
  CHECK(cantor.depth() == 8);
  const auto cusps = parse_profile("min_of_cusps:0.2,2,0.7,1,0.55");
  REQUIRE(cusps.cusps().size() == 2);
  CHECK(cusps.base() == doctest::Approx(0.55));
  CHECK(parse_profile("min_of_cusps:0.2,2,0.7,1").base() == doctest::Approx(0.5));
}

TEST_CASE("profile JSON") {
  const auto p = parse_profile(R"({"family": "min_of_cusps", "cusps": [[0.25, 2], [0.75, 2]], "base": 0.6})");
  CHECK(p.cusps().size() == 2);
  CHECK(p(0.25) == doctest::Approx(0.6));
  CHECK(profile_from_json_text(R"({"family": "constant", "H": 0.3})")(0.1) == doctest::Approx(0.3));
  const auto path = std::filesystem::temp_directory_path() / "varhurst_profile_test.json";
  {
    std::ofstream f(path);
    f << R"({"family": "power_cusp", "x0": 0.4, "gamma": 1.5})";
  }
  CHECK(parse_profile("@" + path.string()).x0() == doctest::Approx(0.4));
  std::filesystem::remove(path);
}

TEST_CASE("malformed profiles") {
  CHECK_THROWS_AS(parse_profile("wavy:1"), ConfigError);
  CHECK_THROWS_AS(parse_profile("power_cusp:0.5"), ConfigError);
  CHECK_THROWS_AS(parse_profile("constant:abc"), ConfigError);
  CHECK_THROWS_AS(parse_profile("{\"family\": \"power_cusp\"}"), ConfigError);
  CHECK_THROWS_AS(parse_profile("@/nonexistent/profile.json"), ConfigError);
  CHECK_THROWS_AS(parse_profile("constant:1.5"), DomainError);
}

TEST_CASE("grids") {
  const auto a = parse_grid("1,2.5,10");
  REQUIRE(a.size() == 3);
  CHECK(a[1] == 2.5);
  const auto g = parse_grid("1:1000:4");
  REQUIRE(g.size() == 4);
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK(g[3] == doctest::Approx(1000.0));
  CHECK_THROWS_AS(parse_grid(""), ConfigError);
  CHECK_THROWS_AS(parse_grid("1:0:3"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1,x"), ConfigError);
}

TEST_CASE("names") {
  CHECK(parse_process("mfbm") == Process::MFBM);
  CHECK(parse_method("volterra") == SpectrumMethod::VolterraSVD);
  CHECK_THROWS_AS(parse_process("bm"), ConfigError);
  CHECK_THROWS_AS(parse_method("qr"), ConfigError);
}

TEST_CASE("config files override fields and reject unknown keys") {
  const auto path = std::filesystem::temp_directory_path() / "varhurst_config_test.json";
  {
    std::ofstream f(path);
    f << R"({"hurst": "power_cusp:0.5,2", "n": 256, "eps_grid": [0.1, 0.05], "seed": 9, "saddle": "gaussian"})";
  }
  ExperimentConfig c;
  c.command = "smallball";
  apply_config_file(path.string(), c);
  CHECK(c.hurst == "power_cusp:0.5,2");
  CHECK(c.n == 256);
  CHECK(c.eps_grid.size() == 2);
  CHECK(c.seed == 9);
  CHECK(c.saddle == "gaussian");
  const std::string text = explain(c);
  CHECK(text.find("\"n\": 256") != std::string::npos);
  {
    std::ofstream f(path);
    f << R"({"nn": 3})";
  }
  CHECK_THROWS_AS(apply_config_file(path.string(), c), ConfigError);
  {
    std::ofstream f(path);
    f << "{not json";
  }
  CHECK_THROWS_AS(apply_config_file(path.string(), c), ConfigError);
  std::filesystem::remove(path);
}
