#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "selfloc/dispersion.hpp"
#include "selfloc/error.hpp"

using namespace selfloc;

TEST_CASE("rest frame carries pure large component on both branches") {
  for (Branch b : {Branch::electron, Branch::positron}) {
    DispersionCoefficients c = coefficients(0.0, 2.0, b);
    CHECK(std::fabs(c.E) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK((b == Branch::electron ? c.E > 0 : c.E < 0));
    CHECK(c.L == 1.0);
    CHECK(c.K == 0.0);
    CHECK(c.L1 == -c.K);
    CHECK(c.K1 == c.L);
    CHECK(residual(c) < 1e-15);
  }
}

TEST_CASE("weights stay normalized and on shell across the momentum range") {
  double e0 = 1.7;
  for (Branch b : {Branch::electron, Branch::positron}) {
    for (double ratio : {1e-8, 0.1, 0.5, 1.0, 5.0, 1e4}) {
      double p = ratio * e0;
      DispersionCoefficients c = coefficients(p, e0, b);
      CHECK(c.L * c.L + c.K * c.K == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(std::fabs(c.E) ==
            doctest::Approx(std::hypot(e0, p)).epsilon(1e-15));
      CHECK(c.L1 == -c.K);
      CHECK(c.K1 == c.L);
      CHECK(residual(c) < 1e-10);
    }
  }
}

TEST_CASE("electron weights match the free-particle closed form") {
  double e0 = 1.0;
  for (double p : {0.3, 1.0, 4.0}) {
    DispersionCoefficients c = coefficients(p, e0, Branch::electron);
    double e = std::sqrt(e0 * e0 + p * p);
    double l_exact = std::sqrt((e + e0) / (2.0 * e));
    CHECK(c.L == doctest::Approx(l_exact).epsilon(1e-14));
    CHECK(c.K == doctest::Approx(p / std::sqrt(2.0 * e * (e + e0)))
                     .epsilon(1e-14));
  }
}

TEST_CASE("ultra-relativistic weights equalize") {
  DispersionCoefficients c = coefficients(1e6, 1.0, Branch::electron);
  CHECK(c.K / c.L == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("detuned energy is detected by both diagnostics") {
  double e0 = 1.3, p = 0.9;
  DispersionCoefficients c = coefficients(p, e0, Branch::electron);
  c.E *= 1.01;
  CHECK(residual(c) > 1e-3);

  double e_on = std::sqrt(e0 * e0 + p * p);
  CHECK(normalized_determinant(p, e_on, e0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  double det = normalized_determinant(p, 1.01 * e_on, e0);
  CHECK(std::fabs(det) > 1e-3);
  CHECK(std::fabs(det) == doctest::Approx(0.00995).epsilon(0.02));
}

TEST_CASE("invalid kinematics are rejected") {
  CHECK_THROWS_AS(coefficients(-1.0, 1.0, Branch::electron), SolverError);
  CHECK_THROWS_AS(coefficients(1.0, 0.0, Branch::electron), SolverError);
  CHECK_THROWS_AS(coefficients(1.0, -2.0, Branch::positron), SolverError);
}
