#pragma once

#include <cstddef>
#include <vector>

#include "selfloc/error.hpp"
#include "selfloc/grid.hpp"

namespace selfloc {

struct PotentialProfile {
  std::vector<double> phi;  // sampled on the owning grid
  double phi_at_zero = 0.0;
};

struct RadialState {
  std::vector<double> u;  // large component, u(0) = 0
  std::vector<double> v;  // small component
  double norm = 0.0;      // int (u^2 + v^2) dx before normalization
  int nodes_u = 0;        // interior sign changes of u
  double epsilon = 0.0;   // energy in units of m
};

struct AsymptoticParams {
  double A = 0.0;   // origin slope, u ~ A x
  double A1 = 0.0;  // tail amplitude, u ~ A1 exp(-lambda x)
};

// One-sided integration result: samples up to/from x_match plus the boundary
// values used for matching.
struct BranchResult {
  std::vector<double> u;  // full grid length; zero outside the covered range
  std::vector<double> v;
  double u_at_match = 0.0;
  double v_at_match = 0.0;
  int nodes_u = 0;  // sign changes within the covered range
};

struct ShootOptions {
  double x_match = 2.0;
  double x_series = 0.01;  // origin power-series handoff point
  double ode_rtol = 3e-13;
  // Root bracket for the unknown; [0, 0) means scan automatically.
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int scan_points = 48;
  double root_tol = 1e-12;
};

enum class ShootUnknown { epsilon, potential_scale };

struct ShootResult {
  RadialState state;
  AsymptoticParams asym;
  double unknown = 0.0;   // the solved eigenvalue (epsilon or scale a)
  double mismatch = 0.0;  // normalized Wronskian defect at x_match
};

// Outward sweep from the origin series (slope A) to x_match.
BranchResult integrate_outward(const RadialGrid& grid,
                               const PotentialProfile& potential,
                               double epsilon, double A, double x_match,
                               const ShootOptions& opts = {});

// Inward sweep from the decaying tail (amplitude A1 at x_max) to x_match.
BranchResult integrate_inward(const RadialGrid& grid,
                              const PotentialProfile& potential,
                              double epsilon, double A1, double x_match,
                              const ShootOptions& opts = {});

// Shooting eigensolve. For ShootUnknown::epsilon the potential is used as
// given and the energy is the unknown; for ShootUnknown::potential_scale the
// profile is the unit-source potential, epsilon is pinned to zero and the
// overall scale multiplying the profile is the unknown. The accepted root
// must carry exactly target_nodes sign changes of u.
ShootResult shoot_match(const RadialGrid& grid,
                        const PotentialProfile& potential, ShootUnknown unknown,
                        int target_nodes, const ShootOptions& opts = {});

int count_sign_changes(std::span<const double> samples);

}  // namespace selfloc
