#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "varhurst/covariance.hpp"
#include "varhurst/errors.hpp"

using namespace varhurst;

TEST_CASE("normalizers agree with the closed form") {
  for (int i = 0; i < 100; ++i) {
    const double H = 0.501 + 0.498 * i / 99.0;
    const double target = std::sqrt(std::tgamma(2.0 * H + 1.0) * std::sin(std::numbers::pi * H));
    CHECK(std::sqrt(2.0 * std::numbers::pi) * C_star(H) == doctest::Approx(target).epsilon(1e-12));
    CHECK(c_star(H) * std::tgamma(H - 0.5) == doctest::Approx(target).epsilon(1e-12));
  }
  CHECK_THROWS_AS(C_star(1.0), DomainError);
  CHECK_THROWS_AS(c_star(0.4), DomainError);
}

TEST_CASE("fbm covariance basics") {
  CHECK(fbm_cov(0.5, 0.3, 0.7) == doctest::Approx(0.3));
  CHECK(fbm_cov(0.75, 0.6, 0.6) == doctest::Approx(std::pow(0.6, 1.5)));
  CHECK(fbm_cov(0.3, 0.2, 0.9) == fbm_cov(0.3, 0.9, 0.2));
}

TEST_CASE("harmonizable covariance matches the frequency integral") {
  const auto p = HurstProfile::power_cusp(0.5, 2.0);
  const auto q = HurstProfile::min_of_cusps({{0.2, 1.0}, {0.8, 2.0}}, 0.35);
  for (const auto& prof : {p, q}) {
    for (auto [x, y] : {std::pair{0.3, 0.7}, std::pair{0.9, 0.1}, std::pair{0.55, 0.6}, std::pair{1.0, 0.02}}) {
      CHECK(mbm_cov(prof, x, y) == doctest::Approx(oracle::mbm_cov(prof, x, y)).epsilon(1e-9));
    }
  }
}

TEST_CASE("harmonizable covariance reduces to fbm for constant H") {
  const auto p = HurstProfile::constant(0.35);
  for (double x : {0.1, 0.5, 0.9})
    for (double y : {0.05, 0.5, 1.0}) CHECK(mbm_cov(p, x, y) == doctest::Approx(fbm_cov(0.35, x, y)).epsilon(1e-13));
}

TEST_CASE("Phi and the Volterra kernel match brute-force quadrature") {
  for (double H : {0.55, 0.7, 0.75, 0.9, 0.98}) {
    const VolterraKernel k(H);
    const double a = H - 0.5;
    for (double s : {1e-4, 0.1, 0.49, 0.5, 0.8, 1.0, 1.7, 2.0, 2.5, 10.0, 1e3}) {
      const double ref = oracle::phi(s, H);
      CHECK(mfbm_Phi(s, H) == doctest::Approx(ref).epsilon(1e-11));
      CHECK(k.Phi_scaled(s) == doctest::Approx(ref / std::pow(s, a)).epsilon(1e-10));
    }
    for (auto [x, y] : {std::pair{0.8, 0.3}, std::pair{0.5, 0.49}, std::pair{1.0, 0.01}, std::pair{0.3, 0.1}}) {
      CHECK(k(x, y) == doctest::Approx(oracle::kernel(x, y, H)).epsilon(1e-10));
      CHECK(mfbm_K(x, y, H) == doctest::Approx(oracle::kernel(x, y, H)).epsilon(1e-10));
    }
    CHECK(k(0.3, 0.5) == 0.0);
  }
}

TEST_CASE("multifractal covariance reduces to fbm for constant H") {
  const auto p = HurstProfile::constant(0.75);
  for (auto [x, y] : {std::pair{0.3, 0.7}, std::pair{1.0, 1.0}, std::pair{0.05, 0.9}})
    CHECK(mfbm_cov(p, x, y) == doctest::Approx(fbm_cov(0.75, x, y)).epsilon(1e-7));
}

TEST_CASE("multifractal covariance matches the kernel product integral") {
  const auto p = HurstProfile::power_cusp(0.5, 2.0, 0.6);
  for (auto [x, y] : {std::pair{0.3, 0.7}, std::pair{0.9, 0.1}, std::pair{0.5, 0.5}, std::pair{1.0, 0.8}})
    CHECK(mfbm_cov(p, x, y) == doctest::Approx(oracle::mfbm_cov(p, x, y)).epsilon(1e-7));
}

TEST_CASE("multifractal covariance is symmetric bit for bit") {
  const auto p = HurstProfile::power_cusp(0.5, 2.0, 0.6);
  for (auto [x, y] : {std::pair{0.3, 0.7}, std::pair{0.2, 0.21}, std::pair{0.9, 0.1}}) CHECK(mfbm_cov(p, x, y) == mfbm_cov(p, y, x));
}

TEST_CASE("Gram matrices are symmetric positive semidefinite and match pointwise values") {
  std::vector<double> nodes;
  for (int i = 0; i < 48; ++i) nodes.push_back((i + 0.5) / 48.0);
  const auto prof = HurstProfile::power_cusp(0.5, 2.0, 0.6);
  for (const CovarianceSpec& spec : {CovarianceSpec::fbm(0.3), CovarianceSpec::mbm(HurstProfile::power_cusp(0.5, 2.0)),
                                     CovarianceSpec::mfbm(prof)}) {
    const Eigen::MatrixXd G = covariance_gram(spec, nodes);
    CHECK((G - G.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    for (int i : {0, 10, 47})
      for (int j : {3, 30, 47}) CHECK(G(i, j) == doctest::Approx(spec(nodes[i], nodes[j])).epsilon(1e-9));
  }
}

TEST_CASE("covariance specs reject profiles outside the process range") {
  CHECK_THROWS_AS(CovarianceSpec::mfbm(HurstProfile::power_cusp(0.5, 2.0, 0.5)), DomainError);
  CHECK_THROWS_AS(CovarianceSpec::mbm(HurstProfile::power_plateau(0.3, 1.0)), DomainError);
  CHECK_THROWS_AS(CovarianceSpec::fbm(1.0), DomainError);
  CHECK_THROWS_AS(covariance_gram(CovarianceSpec::fbm(0.5), {0.5, 0.4}), DomainError);
}
