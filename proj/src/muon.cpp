#include "selfloc/muon.hpp"

#include <cmath>
#include <vector>

namespace selfloc {

namespace {

using Kind = SolverError::Kind;

// Binding functional of a state in the frozen potential a0*phi0, with the
// double-counting correction on the interaction term. Derivatives come from
// the equation right-hand sides.
double binding_integral(const ScfSolution& sol, const RadialState& state) {
  const std::size_t n = sol.grid.size();
  std::vector<double> integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = sol.grid.points[i];
    double u = state.u[i];
    double v = state.v[i];
    double f = sol.a * sol.phi0.phi[i];
    double up = u / x + (1.0 + state.epsilon - f) * v;
    double vp = -v / x + (1.0 - state.epsilon + f) * u;
    double rho = u * u + v * v;
    integrand[i] = up * v - vp * u - 2.0 * u * v / x + (u * u - v * v) +
                   0.5 * f * rho;
  }
  return integrate(sol.grid, integrand);
}

}  // namespace

MuonResult solve_muon_adiabatic(const ScfSolution& sol,
                                const PhysicalConstants& constants,
                                bool adiabatic) {
  if (!adiabatic)
    throw SolverError(Kind::not_implemented,
                      "only the adiabatic (frozen-potential) treatment is "
                      "implemented");
  if (!sol.converged)
    throw SolverError(Kind::invalid_argument, "solution is not converged");

  PotentialProfile frozen;
  frozen.phi.resize(sol.grid.size());
  for (std::size_t i = 0; i < sol.grid.size(); ++i)
    frozen.phi[i] = sol.a * sol.phi0.phi[i];
  frozen.phi_at_zero = sol.a * sol.phi0.phi_at_zero;

  MuonResult out;
  ShootResult ground =
      shoot_match(sol.grid, frozen, ShootUnknown::epsilon, 0);
  ShootResult excited =
      shoot_match(sol.grid, frozen, ShootUnknown::epsilon, 1);
  out.epsilon1 = ground.unknown;
  out.epsilon2 = excited.unknown;
  out.I_mu = binding_integral(sol, ground.state);
  out.I_1mu = binding_integral(sol, excited.state);
  out.ratio_coefficient = std::fabs(constants.a0) / (2.0 * constants.alpha);
  out.mass_ratio =
      out.ratio_coefficient * (out.I_mu - out.I_1mu) / out.I_mu;
  out.level_difference = out.epsilon2 - out.epsilon1;

  std::vector<double> prod(sol.grid.size());
  for (std::size_t i = 0; i < sol.grid.size(); ++i)
    prod[i] = ground.state.u[i] * excited.state.u[i] +
              ground.state.v[i] * excited.state.v[i];
  out.orthogonality = integrate(sol.grid, prod);

  out.ground = std::move(ground.state);
  out.excited = std::move(excited.state);
  return out;
}

}  // namespace selfloc
