#include "selfloc/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace selfloc {

namespace {

using Kind = SolverError::Kind;

void require_converged(const ScfSolution& sol) {
  if (!sol.converged)
    throw SolverError(Kind::invalid_argument, "solution is not converged");
  if (sol.state.u.size() != sol.grid.size() ||
      sol.phi0.phi.size() != sol.grid.size())
    throw SolverError(Kind::invalid_argument,
                      "solution arrays not aligned with grid");
}

// Kinetic-type integrand with derivatives taken from the equation right-hand
// sides, which is exact on the grid samples.
double kinetic_integral(const ScfSolution& sol) {
  const std::size_t n = sol.grid.size();
  std::vector<double> integrand(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = sol.grid.points[i];
    double u = sol.state.u[i];
    double v = sol.state.v[i];
    double f = sol.a * sol.phi0.phi[i];
    double eps = sol.state.epsilon;
    double up = u / x + (1.0 + eps - f) * v;
    double vp = -v / x + (1.0 - eps + f) * u;
    integrand[i] = up * v - vp * u - 2.0 * u * v / x + u * u - v * v;
  }
  return integrate(sol.grid, integrand);
}

}  // namespace

EnergyReport energy_report(const ScfSolution& sol, double alpha) {
  require_converged(sol);
  if (!(alpha > 0.0))
    throw SolverError(Kind::invalid_argument, "alpha must be positive");

  const std::size_t n = sol.grid.size();
  EnergyReport rep;
  rep.T = kinetic_integral(sol);

  std::vector<double> pw(n);
  for (std::size_t i = 0; i < n; ++i) {
    double rho = sol.state.u[i] * sol.state.u[i] +
                 sol.state.v[i] * sol.state.v[i];
    pw[i] = sol.phi0.phi[i] * rho;
  }
  rep.Pi = integrate(sol.grid, pw);

  rep.a_virial = (rep.Pi != 0.0) ? -rep.T / rep.Pi : 0.0;
  rep.virial_residual =
      (sol.a != 0.0) ? std::fabs(sol.a - rep.a_virial) / std::fabs(sol.a)
                     : std::fabs(rep.a_virial);
  rep.E0_units_m0 = (sol.a != 0.0) ? -alpha * rep.T / (2.0 * sol.a) : 0.0;
  if (rep.E0_units_m0 < 0.0)
    throw SolverError(Kind::invalid_argument,
                      "rest energy came out negative; the converged scale a "
                      "has the wrong sign");
  return rep;
}

PhysicalConstants derive_constants(double a0, double T, double alpha,
                                   double m) {
  if (!(a0 < 0.0))
    throw SolverError(Kind::invalid_argument,
                      "a0 must be negative; the localized branch does not "
                      "exist otherwise");
  if (!(T > 0.0))
    throw SolverError(Kind::invalid_argument, "T must be positive");
  if (!(alpha > 0.0))
    throw SolverError(Kind::invalid_argument, "alpha must be positive");
  if (!(m > 0.0))
    throw SolverError(Kind::invalid_argument, "m must be positive");

  PhysicalConstants c;
  c.alpha = alpha;
  c.m = m;
  c.a0 = a0;
  c.T = T;
  c.alpha0 = a0 * a0 / alpha;
  c.e0 = std::sqrt(4.0 * std::numbers::pi * c.alpha0);
  c.xi = a0 / c.alpha0;
  c.C = (1.0 - c.xi) / (1.0 + c.xi);
  c.m0_over_m = 2.0 * std::fabs(a0) / (alpha * T);
  c.Z0 = (alpha / a0) * (alpha / a0);
  c.L0_over_m = 2.0 * c.m0_over_m;
  return c;
}

FormFactorTable form_factor(const ScfSolution& sol,
                            std::span<const double> momenta, double alpha) {
  require_converged(sol);
  if (!(alpha > 0.0))
    throw SolverError(Kind::invalid_argument, "alpha must be positive");
  for (double p : momenta)
    if (!(p >= 0.0))
      throw SolverError(Kind::invalid_argument,
                        "momenta must be non-negative");

  const std::size_t n = sol.grid.size();
  std::vector<double> shape(n);
  for (std::size_t i = 0; i < n; ++i)
    shape[i] = sol.rho[i] / (sol.grid.points[i] * sol.grid.points[i]);
  double f0 = integrate(sol.grid, sol.rho);
  double a_abs = std::fabs(sol.a);

  FormFactorTable table;
  table.momenta.assign(momenta.begin(), momenta.end());
  table.values.resize(momenta.size());
  for (std::size_t i = 0; i < momenta.size(); ++i) {
    double q = alpha * momenta[i] / (2.0 * a_abs);
    table.values[i] =
        (q == 0.0) ? f0 : sine_transform(sol.grid, shape, q) / q;
  }

  // Dipole-squared template fit over the top decade of momenta, least
  // squares in log space with a golden-section scan over log L0.
  table.L0_fit = 0.0;
  double pmax = 0.0;
  for (double p : momenta) pmax = std::max(pmax, p);
  if (pmax > 0.0) {
    std::vector<double> ps, fs;
    for (std::size_t i = 0; i < momenta.size(); ++i)
      if (momenta[i] >= pmax / 10.0 && table.values[i] > 0.0) {
        ps.push_back(momenta[i]);
        fs.push_back(table.values[i]);
      }
    if (ps.size() >= 2) {
      auto loss = [&](double lnL) {
        double L = std::exp(lnL);
        double s = 0.0;
        for (std::size_t i = 0; i < ps.size(); ++i) {
          double t = ps[i] / L;
          double d = std::log(fs[i]) + 2.0 * std::log1p(t * t);
          s += d * d;
        }
        return s;
      };
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double lo = std::log(pmax / 100.0), hi = std::log(pmax * 10.0);
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      double f1 = loss(x1), f2 = loss(x2);
      for (int it = 0; it < 120; ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - gr * (hi - lo);
          f1 = loss(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + gr * (hi - lo);
          f2 = loss(x2);
        }
      }
      table.L0_fit = std::exp(0.5 * (lo + hi));
    }
  }
  return table;
}

OverlapResult overlap_lambda(const RadialGrid& grid,
                             std::span<const double> phi_electron,
                             std::span<const double> phi_muon,
                             const PhysicalConstants& constants) {
  if (phi_electron.size() != grid.size() || phi_muon.size() != grid.size())
    throw SolverError(Kind::invalid_argument,
                      "potential profiles not aligned with grid");

  std::vector<double> diff(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    diff[i] = phi_electron[i] - phi_muon[i];
  std::vector<double> ddiff = derivative(grid, diff);

  auto g = [&](double t) {
    double d = sine_transform(grid, ddiff, t);
    return t * d * d;
  };

  std::vector<double> ts, gs;
  double peak = 0.0;
  for (int i = 0; i <= 500; ++i) {
    double t = 0.02 * i;
    ts.push_back(t);
    gs.push_back(g(t));
    peak = std::max(peak, gs.back());
  }
  double t = ts.back();
  while (true) {
    t *= 1.05;
    ts.push_back(t);
    gs.push_back(g(t));
    peak = std::max(peak, gs.back());
    if (peak == 0.0) break;
    if (t > 40.0 && gs.back() < 1e-12 * peak) break;
    if (t > 1e5) break;
  }

  double lambda = 0.0;
  for (std::size_t i = 1; i < ts.size(); ++i)
    lambda += 0.5 * (gs[i] + gs[i - 1]) * (ts[i] - ts[i - 1]);

  OverlapResult out;
  out.Lambda = lambda;
  double expo = constants.alpha0 * lambda;
  out.overlap_I = std::exp(-expo);
  out.log10_lifetime_seconds = expo * std::numbers::log10e +
                               std::log10(kInverseMassSeconds) -
                               std::log10(constants.m0_over_m);
  return out;
}

}  // namespace selfloc
