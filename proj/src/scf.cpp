#include "selfloc/scf.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <utility>
#include <vector>

namespace selfloc {

namespace {

using Kind = SolverError::Kind;

std::vector<double> seed_density(const RadialGrid& grid) {
  std::vector<double> rho(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double x = grid.points[i];
    rho[i] = 4.0 * x * x * std::exp(-2.0 * x);
  }
  double q = integrate(grid, rho);
  for (double& r : rho) r /= q;
  return rho;
}

double density_residual(const RadialGrid& grid, std::span<const double> a,
                        std::span<const double> b) {
  std::vector<double> d2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double d = a[i] - b[i];
    d2[i] = d * d;
  }
  return std::sqrt(integrate(grid, d2));
}

// One density-relaxation loop with the potential scale frozen at `a_fixed`
// and the level epsilon floating. Used by the continuation path.
void relax_frozen_scale(const RadialGrid& grid, std::vector<double>& rho,
                        double a_fixed, const ScfConfig& config, double tol,
                        int step_index) {
  ShootOptions opts = config.shoot;
  double eps_prev = 0.0;
  bool warm = false;
  for (int it = 1; it <= config.max_outer_iterations; ++it) {
    PotentialProfile phi0 = compute_potential(grid, rho);
    PotentialProfile frozen;
    frozen.phi.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      frozen.phi[i] = a_fixed * phi0.phi[i];
    frozen.phi_at_zero = a_fixed * phi0.phi_at_zero;
    ShootOptions cur = opts;
    if (warm) {
      cur.bracket_lo = std::max(-0.95, eps_prev - 0.2);
      cur.bracket_hi = std::min(0.995, eps_prev + 0.2);
      cur.scan_points = 12;
    }
    ShootResult rs;
    try {
      rs = shoot_match(grid, frozen, ShootUnknown::epsilon, 0, cur);
    } catch (const SolverError& err) {
      if (err.kind != Kind::no_root && err.kind != Kind::wrong_node_count)
        throw;
      std::ostringstream msg;
      msg << "continuation step " << step_index
          << " lost the target level: " << err.what();
      throw SolverError(Kind::non_convergence, msg.str());
    }
    std::vector<double> rho_new(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      rho_new[i] =
          rs.state.u[i] * rs.state.u[i] + rs.state.v[i] * rs.state.v[i];
    double res = density_residual(grid, rho_new, rho);
    eps_prev = rs.unknown;
    warm = true;
    if (config.verbose)
      std::clog << "continuation step " << step_index << " iter " << it
                << ": epsilon = " << rs.unknown << ", residual = " << res
                << "\n";
    if (res < tol) {
      rho = std::move(rho_new);
      return;
    }
    for (std::size_t i = 0; i < grid.size(); ++i)
      rho[i] += config.mixing * (rho_new[i] - rho[i]);
  }
  std::ostringstream msg;
  msg << "continuation step " << step_index << " did not converge within "
      << config.max_outer_iterations << " iterations";
  throw SolverError(Kind::non_convergence, msg.str());
}

ScfSolution scf_solve_from(const ScfConfig& config, const RadialGrid& grid,
                           std::vector<double> rho, double a_start) {
  ScfSolution sol;
  sol.grid = grid;
  double a_prev = a_start;
  int collapse_count = 0;
  bool warm = false;
  for (int it = 1; it <= config.max_outer_iterations; ++it) {
    PotentialProfile phi0 = compute_potential(grid, rho);
    ShootOptions opts = config.shoot;
    opts.bracket_lo = a_prev - 0.35;
    opts.bracket_hi = a_prev + 0.35;
    if (warm) opts.scan_points = 12;
    ShootResult rs;
    bool lost_root = false;
    try {
      rs = shoot_match(grid, phi0, ShootUnknown::potential_scale, 0, opts);
    } catch (const SolverError& err) {
      if (err.kind != Kind::no_root && err.kind != Kind::wrong_node_count)
        throw;
      lost_root = true;
    }
    warm = true;

    double umax = 0.0;
    for (double u : rs.state.u) umax = std::max(umax, std::fabs(u));
    if (lost_root || !(umax > 1e-8) || !std::isfinite(rs.unknown)) {
      // A lost or collapsed iterate gets one fresh start from the seed;
      // a second failure ends the loop as ordinary non-convergence.
      if (++collapse_count > 1) {
        sol.converged = false;
        return sol;
      }
      rho = seed_density(grid);
      a_prev = a_start;
      warm = false;
      continue;
    }

    std::vector<double> rho_new(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      rho_new[i] =
          rs.state.u[i] * rs.state.u[i] + rs.state.v[i] * rs.state.v[i];
    double res = density_residual(grid, rho_new, rho);
    double da = std::fabs(rs.unknown - a_prev);
    a_prev = rs.unknown;

    sol.residual_history.push_back(res);
    sol.iterations = it;
    sol.state = std::move(rs.state);
    sol.phi0 = std::move(phi0);
    sol.a = rs.unknown;
    if (config.verbose)
      std::clog << "scf iter " << it << ": a = " << sol.a
                << ", residual = " << res << ", |da| = " << da << "\n";

    if (res < config.tol_residual && da < config.tol_residual) {
      sol.rho = std::move(rho_new);
      sol.converged = true;
      return sol;
    }
    sol.rho = rho_new;
    for (std::size_t i = 0; i < grid.size(); ++i)
      rho[i] += config.mixing * (rho_new[i] - rho[i]);
  }
  sol.converged = false;
  return sol;
}

}  // namespace

void validate(const ScfConfig& config) {
  if (config.n_points < 100)
    throw SolverError(Kind::invalid_argument, "n_points must be at least 100");
  if (!(config.x_max > 1.0))
    throw SolverError(Kind::invalid_argument, "x_max must exceed 1");
  if (!(config.x_min > 0.0 && config.x_min < config.x_max))
    throw SolverError(Kind::invalid_argument,
                      "x_min must lie in (0, x_max)");
  if (config.max_outer_iterations < 1)
    throw SolverError(Kind::invalid_argument,
                      "max_outer_iterations must be at least 1");
  if (!(config.mixing > 0.0 && config.mixing <= 1.0))
    throw SolverError(Kind::invalid_argument, "mixing must lie in (0, 1]");
  if (!(config.tol_residual > 0.0))
    throw SolverError(Kind::invalid_argument, "tol_residual must be positive");
  if (config.continuation_steps < 1)
    throw SolverError(Kind::invalid_argument,
                      "continuation_steps must be at least 1");
  if (!(config.shoot.x_match > config.x_min &&
        config.shoot.x_match < config.x_max))
    throw SolverError(Kind::invalid_argument,
                      "shoot.x_match must lie in (x_min, x_max)");
  if (!(config.shoot.ode_rtol > 0.0))
    throw SolverError(Kind::invalid_argument,
                      "shoot.ode_rtol must be positive");
}

PotentialProfile compute_potential(const RadialGrid& grid,
                                   std::span<const double> rho) {
  if (rho.size() != grid.size())
    throw SolverError(Kind::invalid_argument,
                      "density not aligned with grid");
  double rmax = 0.0;
  for (double r : rho) rmax = std::max(rmax, std::fabs(r));
  for (double r : rho)
    if (r < -1e-12 * rmax)
      throw SolverError(Kind::invalid_argument,
                        "density must be non-negative");

  const std::size_t n = grid.size();
  std::vector<double> over_y(n);
  for (std::size_t i = 0; i < n; ++i) over_y[i] = rho[i] / grid.points[i];
  std::vector<double> suffix = suffix_integral(grid, over_y);
  std::vector<double> prefix = prefix_integral(grid, rho);

  // Head corrections below x_min assume rho ~ x^2 there.
  double head_q = rho[0] * grid.x_min / 3.0;
  PotentialProfile out;
  out.phi.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.phi[i] = suffix[i] + (prefix[i] + head_q) / grid.points[i];
  out.phi_at_zero = suffix[0] + 0.5 * rho[0];
  return out;
}

ScfSolution scf_solve(const ScfConfig& config) {
  validate(config);
  RadialGrid grid =
      build_grid(config.n_points, config.x_max, config.scheme, config.x_min);
  return scf_solve_from(config, grid, seed_density(grid), config.a_initial);
}

std::vector<ScfSolution> continuation_solve(const ScfConfig& config,
                                            std::span<const double> a_path) {
  validate(config);
  if (a_path.empty())
    throw SolverError(Kind::invalid_argument, "a_path must not be empty");

  std::vector<ScfSolution> out;
  if (a_path.size() == 1) {
    ScfConfig cfg = config;
    cfg.a_initial = a_path[0];
    ScfSolution sol = scf_solve(cfg);
    if (!sol.converged) {
      std::ostringstream msg;
      msg << "continuation step 1 did not converge within "
          << config.max_outer_iterations << " iterations";
      throw SolverError(Kind::non_convergence, msg.str());
    }
    out.push_back(std::move(sol));
    return out;
  }

  RadialGrid grid =
      build_grid(config.n_points, config.x_max, config.scheme, config.x_min);
  std::vector<double> rho = seed_density(grid);
  double tol_inter = std::max(config.tol_residual, 1e-7);
  for (std::size_t k = 0; k + 1 < a_path.size(); ++k) {
    relax_frozen_scale(grid, rho, a_path[k], config, tol_inter,
                       int(k) + 1);
    PotentialProfile phi0 = compute_potential(grid, rho);
    PotentialProfile frozen;
    frozen.phi.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      frozen.phi[i] = a_path[k] * phi0.phi[i];
    frozen.phi_at_zero = a_path[k] * phi0.phi_at_zero;
    ShootResult rs =
        shoot_match(grid, frozen, ShootUnknown::epsilon, 0, config.shoot);
    ScfSolution step;
    step.grid = grid;
    step.state = std::move(rs.state);
    step.rho = rho;
    step.phi0 = std::move(phi0);
    step.a = a_path[k];
    step.converged = true;
    step.iterations = 0;
    out.push_back(std::move(step));
  }
  ScfSolution last =
      scf_solve_from(config, grid, std::move(rho), a_path.back());
  if (!last.converged) {
    std::ostringstream msg;
    msg << "continuation step " << a_path.size() << " did not converge within "
        << config.max_outer_iterations << " iterations";
    throw SolverError(Kind::non_convergence, msg.str());
  }
  out.push_back(std::move(last));
  return out;
}

}  // namespace selfloc
