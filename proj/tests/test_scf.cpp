#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "selfloc/scf.hpp"

using namespace selfloc;

namespace {

// Shared converged solution; solved once, tight tolerance.
const ScfSolution& fixture() {
  static ScfSolution sol = [] {
    ScfConfig cfg;
    cfg.n_points = 1200;
    cfg.x_max = 25.0;
    cfg.tol_residual = 5e-12;
    cfg.max_outer_iterations = 400;
    return scf_solve(cfg);
  }();
  return sol;
}

bool throws_naming(void (*mutate)(ScfConfig&), const std::string& field) {
  ScfConfig cfg;
  mutate(cfg);
  try {
    validate(cfg);
  } catch (const SolverError& e) {
    return e.kind == SolverError::Kind::invalid_argument &&
           std::string(e.what()).find(field) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("config validation names the offending field") {
  CHECK_NOTHROW(validate(ScfConfig{}));
  CHECK(throws_naming([](ScfConfig& c) { c.n_points = 50; }, "n_points"));
  CHECK(throws_naming([](ScfConfig& c) { c.x_max = 0.5; }, "x_max"));
  CHECK(throws_naming([](ScfConfig& c) { c.x_min = -1.0; }, "x_min"));
  CHECK(throws_naming([](ScfConfig& c) { c.max_outer_iterations = 0; },
                      "max_outer_iterations"));
  CHECK(throws_naming([](ScfConfig& c) { c.mixing = 0.0; }, "mixing"));
  CHECK(throws_naming([](ScfConfig& c) { c.mixing = 1.5; }, "mixing"));
  CHECK(throws_naming([](ScfConfig& c) { c.tol_residual = 0.0; },
                      "tol_residual"));
  CHECK(throws_naming([](ScfConfig& c) { c.continuation_steps = 0; },
                      "continuation_steps"));
  CHECK(throws_naming([](ScfConfig& c) { c.shoot.x_match = 50.0; },
                      "x_match"));
  CHECK(throws_naming([](ScfConfig& c) { c.shoot.ode_rtol = 0.0; },
                      "ode_rtol"));
}

TEST_CASE("unit-source potential matches a closed-form smooth profile") {
  // rho = 4 x^2 exp(-2x) has phi0 = exp(-2x)(2x+1)
  //                             + (1 - exp(-2x)(2x^2+2x+1)) / x, phi0(0) = 1.
  RadialGrid g = build_grid(2000, 30.0, GridScheme::log_dense_origin, 1e-4);
  std::vector<double> rho(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.points[i];
    rho[i] = 4.0 * x * x * std::exp(-2.0 * x);
  }
  PotentialProfile p = compute_potential(g, rho);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.points[i];
    double exact = std::exp(-2.0 * x) * (2.0 * x + 1.0) +
                   (1.0 - std::exp(-2.0 * x) * (2.0 * x * x + 2.0 * x + 1.0)) /
                       x;
    worst = std::max(worst, std::fabs(p.phi[i] - exact));
  }
  CHECK(worst < 1e-8);
  CHECK(p.phi_at_zero == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("unit-source potential is linear and rejects bad input") {
  RadialGrid g = build_grid(400, 20.0);
  std::vector<double> rho(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.points[i];
    rho[i] = x * x * std::exp(-x);
  }
  PotentialProfile p1 = compute_potential(g, rho);
  std::vector<double> scaled(rho);
  for (double& r : scaled) r *= 2.5;
  PotentialProfile p2 = compute_potential(g, scaled);
  for (std::size_t i = 0; i < g.size(); i += 37)
    CHECK(p2.phi[i] == doctest::Approx(2.5 * p1.phi[i]).epsilon(1e-12));
  CHECK(p2.phi_at_zero ==
        doctest::Approx(2.5 * p1.phi_at_zero).epsilon(1e-12));

  std::vector<double> zero(g.size(), 0.0);
  PotentialProfile pz = compute_potential(g, zero);
  CHECK(pz.phi_at_zero == 0.0);
  CHECK(*std::max_element(pz.phi.begin(), pz.phi.end()) == 0.0);
  CHECK(*std::min_element(pz.phi.begin(), pz.phi.end()) == 0.0);

  std::vector<double> neg(rho);
  neg[g.size() / 2] = -0.1;
  CHECK_THROWS_AS(compute_potential(g, neg), SolverError);
  std::vector<double> misaligned(g.size() - 1, 1.0);
  CHECK_THROWS_AS(compute_potential(g, misaligned), SolverError);
}

TEST_CASE("discontinuous shell density keeps three digits away from the jump") {
  // rho = 1 on (0, 1]: phi0 = 1 - ln x inside, 1/x outside.
  RadialGrid g = build_grid(4000, 30.0, GridScheme::log_dense_origin, 1e-6);
  std::vector<double> rho(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    rho[i] = g.points[i] <= 1.0 ? 1.0 : 0.0;
  PotentialProfile p = compute_potential(g, rho);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = g.points[i];
    if (x < 0.01 || x > 29.0) continue;
    if (x > 0.9 && x < 1.1) continue;
    double exact = x <= 1.0 ? 1.0 - std::log(x) : 1.0 / x;
    worst = std::max(worst, std::fabs(p.phi[i] - exact));
  }
  CHECK(worst < 5e-3);
}

TEST_CASE("self-consistent solve reaches a converged localized state") {
  const ScfSolution& sol = fixture();
  REQUIRE(sol.converged);
  CHECK(sol.iterations <= 400);
  REQUIRE(!sol.residual_history.empty());
  CHECK(sol.residual_history.back() < 5e-12);
  CHECK(sol.residual_history.back() < sol.residual_history.front());

  CHECK(sol.a < 0.0);
  CHECK(sol.state.nodes_u == 0);
  CHECK(sol.state.epsilon == 0.0);
  CHECK(sol.state.norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate(sol.grid, sol.rho) == doctest::Approx(1.0).epsilon(1e-8));

  // Unit total source: x * phi0(x) -> 1 at the outer edge.
  double edge = sol.grid.x_max * sol.phi0.phi.back();
  CHECK(edge == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("converged density solves the radial Poisson equation") {
  // (x phi0)'' = -rho / x.
  const ScfSolution& sol = fixture();
  REQUIRE(sol.converged);
  std::vector<double> w(sol.grid.size());
  for (std::size_t i = 0; i < sol.grid.size(); ++i)
    w[i] = sol.grid.points[i] * sol.phi0.phi[i];
  std::vector<double> d1 = derivative(sol.grid, w);
  std::vector<double> d2 = derivative(sol.grid, d1);
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < sol.grid.size(); ++i)
    worst = std::max(worst,
                     std::fabs(d2[i] + sol.rho[i] / sol.grid.points[i]));
  CHECK(worst < 1e-4);
}

TEST_CASE("converged state has the localized single-hump shape") {
  const ScfSolution& sol = fixture();
  REQUIRE(sol.converged);
  const auto& u = sol.state.u;
  const auto& v = sol.state.v;

  std::size_t peak = std::max_element(u.begin(), u.end()) - u.begin();
  double umax = u[peak];
  CHECK(umax > 0.0);
  double xpeak = sol.grid.points[peak];
  CHECK(xpeak > 0.8);
  CHECK(xpeak < 3.2);

  int maxima = 0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    if (u[i] < 1e-6 * umax) continue;
    if (u[i] > u[i - 1] && u[i] > u[i + 1]) ++maxima;
  }
  CHECK(maxima == 1);

  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::fabs(x));
  CHECK(vmax < umax);

  // Boundary behavior at the origin: u ~ A x, v ~ B x^2.
  double r10 = u[10] / sol.grid.points[10];
  double r20 = u[20] / sol.grid.points[20];
  CHECK(r10 == doctest::Approx(r20).epsilon(1e-5));
  double s10 = v[10] / (sol.grid.points[10] * sol.grid.points[10]);
  double s20 = v[20] / (sol.grid.points[20] * sol.grid.points[20]);
  CHECK(s10 == doctest::Approx(s20).epsilon(1e-4));

  // Tail ratio approaches -1 like -(1 + O(1/x)).
  for (double x : {15.0, 20.0}) {
    double uu = interpolate(sol.grid, u, x);
    double vv = interpolate(sol.grid, v, x);
    CHECK(std::fabs(vv / uu + 1.0) <
          1.2 * (1.0 + std::fabs(1.0 + sol.a)) / x);
  }
}

TEST_CASE("the converged pair is a fixed point of the density map") {
  const ScfSolution& sol = fixture();
  REQUIRE(sol.converged);
  PotentialProfile p = compute_potential(sol.grid, sol.rho);
  ShootResult rs = shoot_match(sol.grid, p, ShootUnknown::potential_scale, 0);
  CHECK(std::fabs(rs.unknown - sol.a) < 1e-10);
  std::vector<double> d2(sol.grid.size());
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    double rn = rs.state.u[i] * rs.state.u[i] + rs.state.v[i] * rs.state.v[i];
    double d = rn - sol.rho[i];
    d2[i] = d * d;
  }
  CHECK(std::sqrt(integrate(sol.grid, d2)) < 1e-10);
}

TEST_CASE("mixing choice does not move the fixed point") {
  for (double mixing : {0.35, 1.0}) {
    ScfConfig cfg;
    cfg.n_points = 1200;
    cfg.x_max = 25.0;
    cfg.mixing = mixing;
    cfg.tol_residual = 1e-10;
    cfg.max_outer_iterations = 400;
    ScfSolution sol = scf_solve(cfg);
    REQUIRE(sol.converged);
    CHECK(std::fabs(sol.a - fixture().a) < 1e-8);
  }
}

TEST_CASE("a starved iteration budget reports non-convergence") {
  ScfConfig cfg;
  cfg.n_points = 600;
  cfg.x_max = 20.0;
  cfg.max_outer_iterations = 2;
  cfg.tol_residual = 1e-12;
  ScfSolution sol = scf_solve(cfg);
  CHECK(!sol.converged);
  CHECK(sol.iterations == 2);
  CHECK(sol.residual_history.size() == 2);
}

TEST_CASE("single-entry continuation reduces to the direct solve") {
  ScfConfig cfg;
  cfg.n_points = 600;
  cfg.x_max = 20.0;
  cfg.tol_residual = 1e-9;
  ScfSolution direct = scf_solve(cfg);
  REQUIRE(direct.converged);
  std::vector<double> path = {cfg.a_initial};
  auto sols = continuation_solve(cfg, path);
  REQUIRE(sols.size() == 1);
  CHECK(sols[0].a == direct.a);
  CHECK(sols[0].iterations == direct.iterations);
}

TEST_CASE("a staged scale ramp lands on the same solution") {
  ScfConfig cfg;
  cfg.n_points = 600;
  cfg.x_max = 20.0;
  cfg.tol_residual = 1e-9;
  ScfSolution direct = scf_solve(cfg);
  REQUIRE(direct.converged);

  std::vector<double> path = {-2.0, -2.2, -2.4, -2.31};
  auto sols = continuation_solve(cfg, path);
  REQUIRE(sols.size() == path.size());
  for (std::size_t k = 0; k + 1 < sols.size(); ++k) {
    CHECK(sols[k].a == path[k]);
    CHECK(sols[k].converged);
    CHECK(sols[k].iterations == 0);
    CHECK(sols[k].state.nodes_u == 0);
  }
  // The floating level drops monotonically as the frozen scale deepens and
  // changes sign across the self-consistent point.
  CHECK(sols[0].state.epsilon > sols[1].state.epsilon);
  CHECK(sols[1].state.epsilon > sols[2].state.epsilon);
  CHECK(sols[1].state.epsilon > 0.0);
  CHECK(sols[2].state.epsilon < 0.0);

  CHECK(sols.back().converged);
  CHECK(std::fabs(sols.back().a - direct.a) < 1e-6);
}

TEST_CASE("continuation rejects an empty path and names a starved step") {
  ScfConfig cfg;
  cfg.n_points = 600;
  cfg.x_max = 20.0;
  CHECK_THROWS_AS(continuation_solve(cfg, std::vector<double>{}), SolverError);

  cfg.max_outer_iterations = 2;
  std::vector<double> path = {-2.2, -3.5};
  try {
    continuation_solve(cfg, path);
    FAIL("expected non-convergence");
  } catch (const SolverError& e) {
    CHECK(e.kind == SolverError::Kind::non_convergence);
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
}
