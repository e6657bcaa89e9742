#pragma once

namespace selfloc {

enum class Branch { electron, positron };

struct DispersionCoefficients {
  double P = 0.0;  // momentum in units of m0
  Branch branch = Branch::electron;
  double E = 0.0;   // on-shell energy, sign follows the branch
  double E0 = 0.0;  // rest energy the shell was built from
  double L = 0.0;   // large-component weight
  double K = 0.0;   // small-component weight, L^2 + K^2 = 1
  double L1 = 0.0;  // conjugate-branch weights: L1 = -K
  double K1 = 0.0;  //                           K1 =  L
};

// Plane-wave weights on the quasi-particle shell E^2 = E0^2 + P^2.
// Cancellation-free forms are used near P = 0, where (L, K) -> (1, 0).
DispersionCoefficients coefficients(double P, double E0, Branch branch);

// Max normalized row defect of the 2x2 shell system applied to (L, K),
// plus the unit-norm and conjugate-weight defects. Small only when E, L, K
// are mutually consistent at the stored E0.
double residual(const DispersionCoefficients& coeffs);

// (E^2 - E0^2 - P^2) / (E^2 + E0^2 + P^2): zero exactly on shell, O(delta)
// at relative detuning delta.
double normalized_determinant(double P, double E, double E0);

}  // namespace selfloc
