#pragma once

#include <span>
#include <vector>

#include "selfloc/scf.hpp"
#include "selfloc/version.hpp"

namespace selfloc {

struct EnergyReport {
  double T = 0.0;         // kinetic-plus-mass functional of the state
  double Pi = 0.0;        // self-interaction functional of the density
  double a_virial = 0.0;  // -T/Pi, must reproduce the solved scale
  double E0_units_m0 = 0.0;
  double virial_residual = 0.0;  // |a - a_virial| / |a|
};

// Functionals evaluated with derivatives taken from the equation right-hand
// side (the finite-difference route is kept as a cross-check in the tests).
EnergyReport energy_report(const ScfSolution& solution,
                           double alpha = kAlphaDefault);

struct PhysicalConstants {
  double alpha = 0.0;  // input coupling
  double m = 0.0;      // input mass scale
  double a0 = 0.0;     // converged potential scale (negative)
  double T = 0.0;
  double alpha0 = 0.0;     // a0 / xi
  double e0 = 0.0;         // sqrt(4 pi alpha0)
  double xi = 0.0;         // a0 / alpha0 = alpha / a0, negative
  double C = 0.0;          // (1 - xi) / (1 + xi)
  double m0_over_m = 0.0;  // 2 |a0| / (alpha T)
  double Z0 = 0.0;         // alpha^2 / a0^2
  double L0_over_m = 0.0;  // 2 m0_over_m
};

// Algebraic chain from the dimensionless fixed point to laboratory scales.
// Throws SolverError{invalid_argument} when a0 >= 0.
PhysicalConstants derive_constants(double a0, double T,
                                   double alpha = kAlphaDefault,
                                   double m = 1.0);

struct FormFactorTable {
  std::vector<double> momenta;  // lab units of m
  std::vector<double> values;   // F(p), F(0) = 1
  double L0_fit = 0.0;          // scale of the dipole-squared template fit
};

// Charge form factor of the converged density: spherical average
//   F(p) = int rho(x) sinc(q x) dx,  q = alpha p / (2 |a0|).
// Momenta must be non-negative; the p = 0 entry is forced to the exact
// normalization integral. L0_fit minimizes the log-space defect of
// 1 / (1 + (p/L0)^2)^2 over the largest sampled momentum decade.
FormFactorTable form_factor(const ScfSolution& solution,
                            std::span<const double> momenta,
                            double alpha = kAlphaDefault);

struct OverlapResult {
  double Lambda = 0.0;  // int t |dPhi(t)|^2 dt of the potential mismatch
  double log10_lifetime_seconds = 0.0;
  double overlap_I = 0.0;  // exp(-alpha0 Lambda), may underflow to 0
};

// Vacuum-overlap suppression between two potential profiles sampled on the
// same grid. Phi(t) is the sine transform of the profile slope; the linear
// t-grid is extended geometrically until the integrand falls below 1e-12 of
// its peak.
OverlapResult overlap_lambda(const RadialGrid& grid,
                             std::span<const double> phi_electron,
                             std::span<const double> phi_muon,
                             const PhysicalConstants& constants);

}  // namespace selfloc
