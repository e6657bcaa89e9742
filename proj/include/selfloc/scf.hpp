#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "selfloc/dirac.hpp"
#include "selfloc/grid.hpp"

namespace selfloc {

struct ScfConfig {
  std::size_t n_points = 4000;
  double x_max = 30.0;
  double x_min = 1e-4;
  GridScheme scheme = GridScheme::log_dense_origin;
  int max_outer_iterations = 200;
  double mixing = 0.5;  // in (0, 1]; 1.0 disables damping
  double tol_residual = 1e-9;
  double a_initial = -3.5;
  int continuation_steps = 10;
  bool verbose = false;
  ShootOptions shoot;
};

// Throws SolverError{invalid_argument} naming the offending field.
void validate(const ScfConfig& config);

struct ScfSolution {
  RadialGrid grid;
  RadialState state;           // normalized bound state at epsilon = 0
  std::vector<double> rho;     // u^2 + v^2, integrates to 1
  PotentialProfile phi0;       // unit-source potential of rho
  double a = 0.0;              // potential scale, phi = a * phi0
  std::vector<double> residual_history;
  bool converged = false;
  int iterations = 0;
};

// Unit-source radial potential of a density rho with int rho dx = 1:
//   phi0(x) = int_x^inf rho/y dy + (1/x) int_0^x rho dy
// so x*phi0 -> 1 at large x and phi0 solves (x^2 phi0')' = -rho.
PotentialProfile compute_potential(const RadialGrid& grid,
                                   std::span<const double> rho);

// Self-consistent field loop: density -> potential -> eigensolve for the
// scale a at epsilon = 0 -> new density, with linear mixing on the density.
// Converged means BOTH the L2 density residual and the change in a fall
// below tol_residual.
ScfSolution scf_solve(const ScfConfig& config);

// Homotopy over a path of scale values: intermediate entries freeze the
// potential scale and relax the density (the energy offset floats), the
// final entry releases the scale as the eigenvalue, warm-started from the
// relaxed density. Returns one solution per path entry. A single-entry path
// reduces to scf_solve with a_initial = path[0]. A step that fails to
// converge throws SolverError{non_convergence} naming the step index.
std::vector<ScfSolution> continuation_solve(const ScfConfig& config,
                                            std::span<const double> a_path);

}  // namespace selfloc
