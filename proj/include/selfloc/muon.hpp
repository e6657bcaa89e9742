#pragma once

#include "selfloc/observables.hpp"
#include "selfloc/scf.hpp"

namespace selfloc {

struct MuonResult {
  double epsilon1 = 0.0;  // ground level in the frozen potential
  double epsilon2 = 0.0;  // first excited level
  double I_mu = 0.0;      // energy integral of the ground state
  double I_1mu = 0.0;     // energy integral of the excited state
  double ratio_coefficient = 0.0;  // |a0| / (2 alpha)
  double mass_ratio = 0.0;  // ratio_coefficient * (I_mu - I_1mu) / I_mu
  double level_difference = 0.0;  // epsilon2 - epsilon1, reported alongside
  double orthogonality = 0.0;     // int (u1 u2 + v1 v2) dx
  RadialState ground;
  RadialState excited;
};

// Second-fermion levels in the potential frozen at the converged electron
// solution: solve the zero-node and one-node states of a0 * phi0, then form
//   I = int { u'v - v'u - 2uv/x + (u^2 - v^2) + (a0/2) phi0 (u^2+v^2) } dx
// for each. Only the adiabatic (frozen-potential) treatment exists;
// adiabatic = false throws SolverError{not_implemented}.
MuonResult solve_muon_adiabatic(const ScfSolution& solution,
                                const PhysicalConstants& constants,
                                bool adiabatic = true);

}  // namespace selfloc
