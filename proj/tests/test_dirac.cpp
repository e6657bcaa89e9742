#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "selfloc/dirac.hpp"
#include "selfloc/grid.hpp"

using namespace selfloc;

namespace {

// Exact unit-source potential of the density 4 x^2 e^{-2x}.
double seed_phi0(double x) {
  return std::exp(-2.0 * x) * (2.0 * x + 1.0) +
         (1.0 - std::exp(-2.0 * x) * (2.0 * x * x + 2.0 * x + 1.0)) / x;
}

PotentialProfile seed_profile(const RadialGrid& g, double scale) {
  PotentialProfile p;
  p.phi.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    p.phi[i] = scale * seed_phi0(g.points[i]);
  p.phi_at_zero = scale;
  return p;
}

PotentialProfile const_profile(const RadialGrid& g, double c) {
  PotentialProfile p;
  p.phi.assign(g.size(), c);
  p.phi_at_zero = c;
  return p;
}

// Regular solution of the radial system with constant potential c at
// epsilon = 0, unit slope at the origin.
void const_phi_exact(double c, double x, double& u, double& v) {
  double k2 = 1.0 - c * c;
  if (k2 > 0.0) {
    double k = std::sqrt(k2);
    u = std::sinh(k * x) / k;
    v = (std::cosh(k * x) - std::sinh(k * x) / (k * x)) / (1.0 - c);
  } else {
    double k = std::sqrt(-k2);
    u = std::sin(k * x) / k;
    v = (std::cos(k * x) - std::sin(k * x) / (k * x)) / (1.0 - c);
  }
}

std::size_t node_at(const RadialGrid& g, double x) {
  auto it = std::lower_bound(g.points.begin(), g.points.end(), x - 1e-9);
  REQUIRE(it != g.points.end());
  REQUIRE(*it == doctest::Approx(x).epsilon(1e-12));
  return std::size_t(it - g.points.begin());
}

}  // namespace

TEST_CASE("outward sweep matches the constant-potential solution") {
  RadialGrid g = build_grid(1200, 10.0, GridScheme::log_dense_origin, 1e-4);
  for (double c : {0.5, -0.5, 2.0}) {
    PotentialProfile p = const_profile(g, c);
    BranchResult br = integrate_outward(g, p, 0.0, 1.0, 2.0);
    double ue, ve;
    const_phi_exact(c, 2.0, ue, ve);
    CHECK(br.u_at_match == doctest::Approx(ue).epsilon(1e-8));
    CHECK(br.v_at_match == doctest::Approx(ve).epsilon(1e-8));
    for (double x : {0.05, 0.4, 1.3}) {
      std::size_t i =
          std::upper_bound(g.points.begin(), g.points.end(), x) -
          g.points.begin();
      const_phi_exact(c, g.points[i], ue, ve);
      CHECK(br.u[i] == doctest::Approx(ue).epsilon(1e-8));
      CHECK(br.v[i] == doctest::Approx(ve).epsilon(1e-8));
    }
  }
}

TEST_CASE("outward sweep grows like the free exponential envelope") {
  RadialGrid g = build_grid(2951, 30.0, GridScheme::uniform, 0.5);
  PotentialProfile p = const_profile(g, 0.0);
  BranchResult br = integrate_outward(g, p, 0.0, 1.0, 25.0);
  double r = br.u[node_at(g, 20.0)] / br.u[node_at(g, 10.0)];
  CHECK(r > 0.5 * std::exp(10.0));
  CHECK(r < 2.0 * std::exp(10.0));
}

TEST_CASE("inward sweep self-cleans onto the decaying free solution") {
  RadialGrid g = build_grid(2951, 30.0, GridScheme::uniform, 0.5);
  PotentialProfile p = const_profile(g, 0.0);
  BranchResult br = integrate_inward(g, p, 0.0, 1.0, 5.0);
  std::size_t i10 = node_at(g, 10.0), i15 = node_at(g, 15.0);
  CHECK(br.u[i10] / br.u[i15] == doctest::Approx(std::exp(5.0)).epsilon(1e-8));
  for (double x : {10.0, 15.0, 20.0}) {
    std::size_t i = node_at(g, x);
    CHECK(br.v[i] / br.u[i] ==
          doctest::Approx(-(1.0 + 1.0 / x)).epsilon(1e-8));
  }
}

TEST_CASE("inward sweep rejects epsilon outside the open unit interval") {
  RadialGrid g = build_grid(300, 10.0);
  PotentialProfile p = const_profile(g, 0.0);
  CHECK_THROWS_AS(integrate_inward(g, p, 1.0, 1.0, 2.0), SolverError);
  CHECK_THROWS_AS(integrate_inward(g, p, -1.5, 1.0, 2.0), SolverError);
}

TEST_CASE("unbounded growth raises the overflow error") {
  RadialGrid g = build_grid(500, 400.0, GridScheme::uniform, 1.0);
  PotentialProfile p = const_profile(g, 0.0);
  try {
    integrate_outward(g, p, 0.0, 1.0, 400.0);
    FAIL("expected an overflow error");
  } catch (const SolverError& e) {
    CHECK(e.kind == SolverError::Kind::overflow);
  }
}

TEST_CASE("sign-change counter handles zeros and plateaus") {
  auto count = [](std::vector<double> v) {
    return count_sign_changes(v);
  };
  CHECK(count({}) == 0);
  CHECK(count({0.0, 0.0, 0.0}) == 0);
  CHECK(count({1.0, 2.0, 3.0}) == 0);
  CHECK(count({1.0, -1.0}) == 1);
  CHECK(count({1.0, 0.0, -1.0}) == 1);
  CHECK(count({1.0, 0.0, 1.0}) == 0);
  CHECK(count({-1.0, 2.0, -3.0, 4.0}) == 3);
}

TEST_CASE("shooting in a frozen analytic potential finds clean eigenstates") {
  RadialGrid g = build_grid(1600, 30.0, GridScheme::log_dense_origin, 1e-4);
  PotentialProfile p = seed_profile(g, -2.5);

  ShootResult ground = shoot_match(g, p, ShootUnknown::epsilon, 0);
  CHECK(ground.mismatch < 1e-10);
  CHECK(ground.state.nodes_u == 0);
  CHECK(std::fabs(ground.state.norm - 1.0) < 1e-10);
  CHECK(ground.unknown > -1.0);
  CHECK(ground.unknown < 1.0);

  ShootResult excited = shoot_match(g, p, ShootUnknown::epsilon, 1);
  CHECK(excited.mismatch < 1e-10);
  CHECK(excited.state.nodes_u == 1);
  CHECK(excited.unknown > ground.unknown);

  try {
    ShootResult second = shoot_match(g, p, ShootUnknown::epsilon, 2);
    CHECK(second.unknown > excited.unknown);
    CHECK(second.state.nodes_u == 2);
  } catch (const SolverError& e) {
    CHECK(e.kind == SolverError::Kind::wrong_node_count);
  }
}

TEST_CASE("eigenvalues are stable under grid doubling") {
  auto eps_on = [](std::size_t n) {
    RadialGrid g = build_grid(n, 30.0, GridScheme::log_dense_origin, 1e-4);
    PotentialProfile p = seed_profile(g, -2.5);
    return shoot_match(g, p, ShootUnknown::epsilon, 0).unknown;
  };
  double e2000 = eps_on(2000), e4000 = eps_on(4000);
  CHECK(std::fabs(e2000 - e4000) < 1e-5);
}

TEST_CASE("scale mode and level mode agree on the self-consistency point") {
  RadialGrid g = build_grid(1600, 30.0, GridScheme::log_dense_origin, 1e-4);
  PotentialProfile unit = seed_profile(g, 1.0);
  ShootResult scale = shoot_match(g, unit, ShootUnknown::potential_scale, 0);
  CHECK(scale.mismatch < 1e-10);
  CHECK(scale.unknown < 0.0);
  CHECK(scale.state.epsilon == 0.0);

  PotentialProfile frozen = seed_profile(g, scale.unknown);
  ShootResult level = shoot_match(g, frozen, ShootUnknown::epsilon, 0);
  CHECK(std::fabs(level.unknown) < 1e-6);
}

TEST_CASE("scale mode rejects an identically zero profile") {
  RadialGrid g = build_grid(300, 10.0);
  PotentialProfile zero = const_profile(g, 0.0);
  try {
    shoot_match(g, zero, ShootUnknown::potential_scale, 0);
    FAIL("expected an invalid-argument error");
  } catch (const SolverError& e) {
    CHECK(e.kind == SolverError::Kind::invalid_argument);
  }
}

TEST_CASE("a too-weak profile yields no scale root in the search range") {
  RadialGrid g = build_grid(600, 30.0, GridScheme::log_dense_origin, 1e-4);
  PotentialProfile weak = seed_profile(g, 0.1);
  try {
    shoot_match(g, weak, ShootUnknown::potential_scale, 0);
    FAIL("expected a no-root error");
  } catch (const SolverError& e) {
    CHECK(e.kind == SolverError::Kind::no_root);
    CHECK(std::string(e.what()).find("scan points") != std::string::npos);
  }
}

TEST_CASE("an unreachable node count is reported with the counts seen") {
  // Exponentially cut potential: short range, holds exactly one level.
  RadialGrid g = build_grid(800, 30.0, GridScheme::log_dense_origin, 1e-4);
  PotentialProfile p;
  p.phi.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    p.phi[i] = -4.0 * seed_phi0(g.points[i]) * std::exp(-g.points[i]);
  p.phi_at_zero = -4.0;
  try {
    shoot_match(g, p, ShootUnknown::epsilon, 1);
    FAIL("expected a wrong-node-count error");
  } catch (const SolverError& e) {
    CHECK(e.kind == SolverError::Kind::wrong_node_count);
    CHECK(std::string(e.what()).find("node counts {0}") != std::string::npos);
    CHECK(std::string(e.what()).find("target was 1") != std::string::npos);
  }
}

TEST_CASE("a staggered matrix discretization confirms the two lowest levels") {
  // Finite differences on [1e-3, 10]: u on interior cell boundaries, v on
  // cell midpoints, Dirichlet u at both ends.
  const double a = 1e-3, b = 10.0;
  const int M = 400;
  const double h = (b - a) / M;
  const int nu = M - 1, nv = M;
  auto phi = [](double x) { return -2.5 * seed_phi0(x); };

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nu + nv, nu + nv);
  for (int i = 0; i < nu; ++i) {
    double x = a + (i + 1) * h;
    H(i, i) = 1.0 + phi(x);
    H(i, nu + i) = 1.0 / h - 0.5 / x;
    H(i, nu + i + 1) = -1.0 / h - 0.5 / x;
  }
  for (int k = 0; k < nv; ++k) {
    double x = a + (k + 0.5) * h;
    H(nu + k, nu + k) = -(1.0 - phi(x));
    if (k <= nu - 1) H(nu + k, k) = 1.0 / h - 0.5 / x;
    if (k >= 1) H(nu + k, k - 1) = -1.0 / h - 0.5 / x;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> solver(H);
  std::vector<double> levels;
  for (int i = 0; i < solver.eigenvalues().size(); ++i) {
    std::complex<double> z = solver.eigenvalues()[i];
    if (std::fabs(z.imag()) < 1e-8 && std::fabs(z.real()) < 0.999)
      levels.push_back(z.real());
  }
  REQUIRE(levels.size() >= 2);

  RadialGrid g = build_grid(2000, 30.0, GridScheme::log_dense_origin, 1e-4);
  PotentialProfile p = seed_profile(g, -2.5);
  for (int nodes : {0, 1}) {
    double eps = shoot_match(g, p, ShootUnknown::epsilon, nodes).unknown;
    double best = 1e9;
    for (double lv : levels) best = std::min(best, std::fabs(lv - eps));
    CHECK(best < 1e-3);
  }
}
