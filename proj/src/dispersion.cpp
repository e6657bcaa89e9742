#include "selfloc/dispersion.hpp"

#include <algorithm>
#include <cmath>

#include "selfloc/error.hpp"

namespace selfloc {

namespace {
using Kind = SolverError::Kind;
}

DispersionCoefficients coefficients(double P, double E0, Branch branch) {
  if (!(P >= 0.0))
    throw SolverError(Kind::invalid_argument, "P must be non-negative");
  if (!(E0 > 0.0))
    throw SolverError(Kind::invalid_argument, "E0 must be positive");

  double Es = std::sqrt(E0 * E0 + P * P);
  DispersionCoefficients c;
  c.P = P;
  c.E0 = E0;
  c.branch = branch;
  if (branch == Branch::electron) {
    c.E = Es;
    if (P == 0.0) {
      c.L = 1.0;
      c.K = 0.0;
    } else {
      // E - E0 written cancellation-free.
      double d = P * P / (Es + E0);
      double nrm = std::hypot(P, d);
      c.L = P / nrm;
      c.K = d / nrm;
    }
  } else {
    c.E = -Es;
    if (P == 0.0) {
      c.L = 1.0;
      c.K = 0.0;
    } else {
      double s = -P * P / (E0 + Es);  // E + E0
      double nrm = std::hypot(P, s);
      c.L = P / nrm;
      c.K = s / nrm;
    }
  }
  c.L1 = -c.K;
  c.K1 = c.L;
  return c;
}

double residual(const DispersionCoefficients& c) {
  double m11, m12, m21, m22;
  if (c.branch == Branch::electron) {
    m11 = c.E - c.E0;
    m12 = -c.P;
    m21 = -c.P;
    m22 = c.E + c.E0;
  } else {
    m11 = c.E + c.E0;
    m12 = -c.P;
    m21 = -c.P;
    m22 = c.E - c.E0;
  }
  double norm = std::max({std::fabs(m11) + std::fabs(m12),
                          std::fabs(m21) + std::fabs(m22), 1e-300});
  double r1 = std::fabs(m11 * c.L + m12 * c.K) / norm;
  double r2 = std::fabs(m21 * c.L + m22 * c.K) / norm;
  double rn = std::fabs(c.L * c.L + c.K * c.K - 1.0);
  double rc = std::max(std::fabs(c.L1 + c.K), std::fabs(c.K1 - c.L));
  return std::max({r1, r2, rn, rc});
}

double normalized_determinant(double P, double E, double E0) {
  double num = E * E - E0 * E0 - P * P;
  double den = E * E + E0 * E0 + P * P;
  return (den > 0.0) ? num / den : 0.0;
}

}  // namespace selfloc
