#include "selfloc/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

namespace selfloc {

namespace {

using Kind = SolverError::Kind;

constexpr double kOverflowLimit = 1e150;

struct Rhs {
  const RadialGrid& grid;
  std::span<const double> phi;
  double phi_at_zero;
  double scale;  // multiplies the sampled profile
  double epsilon;

  double phi_at(double x) const { return scale * interpolate(grid, phi, x); }

  void eval(double x, const double y[2], double dy[2]) const {
    double f = phi_at(x);
    dy[0] = y[0] / x + (1.0 + epsilon - f) * y[1];
    dy[1] = -y[1] / x + (1.0 - epsilon + f) * y[0];
  }
};

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                 A53 = 64448.0 / 6561, A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
// Quartic dense-output weights.
constexpr double D1 = -12715105075.0 / 11282082432.0;
constexpr double D3 = 87487479700.0 / 32700410799.0;
constexpr double D4 = -10690763975.0 / 1880347072.0;
constexpr double D5 = 701980252875.0 / 199316789632.0;
constexpr double D6 = -1453857185.0 / 822651844.0;
constexpr double D7 = 69997945.0 / 29380423.0;

// Advances y from xa to xb (either direction), writing dense-output values
// into (u_fill, v_fill) at every grid node passed over, xb inclusive.
void integrate_span(const Rhs& rhs, double xa, double xb, double y[2],
                    double rtol, std::vector<double>& u_fill,
                    std::vector<double>& v_fill) {
  const std::vector<double>& p = rhs.grid.points;
  const std::ptrdiff_t n = std::ptrdiff_t(p.size());
  const int dir = (xb > xa) ? 1 : -1;
  std::ptrdiff_t idx;
  if (dir > 0)
    idx = std::upper_bound(p.begin(), p.end(), xa) - p.begin();
  else
    idx = (std::lower_bound(p.begin(), p.end(), xa) - p.begin()) - 1;

  double x = xa;
  double h = (xb - xa) / 256.0;
  double k1[2], k2[2], k3[2], k4[2], k5[2], k6[2], k7[2];
  double yt[2], ynew[2];
  rhs.eval(x, y, k1);

  for (long step = 0;; ++step) {
    if (step > 5000000)
      throw SolverError(Kind::non_convergence,
                        "radial integrator exceeded its step budget");
    bool last = false;
    if ((dir > 0 && x + h >= xb) || (dir < 0 && x + h <= xb)) {
      h = xb - x;
      last = true;
    }

    for (int c = 0; c < 2; ++c) yt[c] = y[c] + h * A21 * k1[c];
    rhs.eval(x + 0.2 * h, yt, k2);
    for (int c = 0; c < 2; ++c) yt[c] = y[c] + h * (A31 * k1[c] + A32 * k2[c]);
    rhs.eval(x + 0.3 * h, yt, k3);
    for (int c = 0; c < 2; ++c)
      yt[c] = y[c] + h * (A41 * k1[c] + A42 * k2[c] + A43 * k3[c]);
    rhs.eval(x + 0.8 * h, yt, k4);
    for (int c = 0; c < 2; ++c)
      yt[c] = y[c] +
              h * (A51 * k1[c] + A52 * k2[c] + A53 * k3[c] + A54 * k4[c]);
    rhs.eval(x + (8.0 / 9.0) * h, yt, k5);
    for (int c = 0; c < 2; ++c)
      yt[c] = y[c] + h * (A61 * k1[c] + A62 * k2[c] + A63 * k3[c] +
                          A64 * k4[c] + A65 * k5[c]);
    rhs.eval(x + h, yt, k6);
    for (int c = 0; c < 2; ++c)
      ynew[c] = y[c] + h * (B1 * k1[c] + B3 * k3[c] + B4 * k4[c] +
                            B5 * k5[c] + B6 * k6[c]);
    rhs.eval(x + h, ynew, k7);

    double errmax = 0.0;
    for (int c = 0; c < 2; ++c) {
      double e = h * (E1 * k1[c] + E3 * k3[c] + E4 * k4[c] + E5 * k5[c] +
                      E6 * k6[c] + E7 * k7[c]);
      errmax = std::max(errmax, std::fabs(e));
    }
    double sc = rtol * std::max({std::fabs(y[0]), std::fabs(y[1]),
                                 std::fabs(ynew[0]), std::fabs(ynew[1]),
                                 1e-290});
    double errn = errmax / sc;

    if (errn <= 1.0) {
      double x2 = last ? xb : x + h;
      double ftol = 1e-12 * (1.0 + std::fabs(x2));
      bool any = (dir > 0) ? (idx < n && p[idx] <= x2 + ftol)
                           : (idx >= 0 && p[idx] >= x2 - ftol);
      if (any) {
        double r1[2], r2[2], r3[2], r4[2], r5[2];
        for (int c = 0; c < 2; ++c) {
          double dy = ynew[c] - y[c];
          r1[c] = y[c];
          r2[c] = dy;
          r3[c] = h * k1[c] - dy;
          r4[c] = dy - h * k7[c] - r3[c];
          r5[c] = h * (D1 * k1[c] + D3 * k3[c] + D4 * k4[c] + D5 * k5[c] +
                       D6 * k6[c] + D7 * k7[c]);
        }
        while ((dir > 0) ? (idx < n && p[idx] <= x2 + ftol)
                         : (idx >= 0 && p[idx] >= x2 - ftol)) {
          double th = std::clamp((p[idx] - x) / h, 0.0, 1.0);
          u_fill[idx] = r1[0] + th * (r2[0] + (1.0 - th) *
                                                  (r3[0] + th * (r4[0] +
                                                   (1.0 - th) * r5[0])));
          v_fill[idx] = r1[1] + th * (r2[1] + (1.0 - th) *
                                                  (r3[1] + th * (r4[1] +
                                                   (1.0 - th) * r5[1])));
          idx += dir;
        }
      }
      x = x2;
      y[0] = ynew[0];
      y[1] = ynew[1];
      k1[0] = k7[0];
      k1[1] = k7[1];
      if (std::max(std::fabs(y[0]), std::fabs(y[1])) > kOverflowLimit)
        throw SolverError(Kind::overflow,
                          "radial amplitude exceeded 1e150; parameters are "
                          "outside the bound-state regime");
      if (last) return;
    }
    double fac = 0.9 * std::pow(std::max(errn, 1e-16), -0.2);
    h *= std::clamp(fac, 0.2, 5.0);
    if (!(std::fabs(h) > 1e-14 * (1.0 + std::fabs(x))))
      throw SolverError(Kind::non_convergence,
                        "radial integrator step size underflow");
  }
}

void series_uv(double A, double epsilon, double phi0, double x, double& u,
               double& v) {
  double cm = 1.0 + epsilon - phi0;
  double cp = 1.0 - epsilon + phi0;
  u = A * x * (1.0 + cm * cp * x * x / 6.0);
  v = A * cp * x * x / 3.0;
}

void check_potential(const RadialGrid& grid, std::span<const double> phi) {
  if (phi.size() != grid.size())
    throw SolverError(Kind::invalid_argument,
                      "potential profile not aligned with grid");
}

BranchResult sweep_outward(const RadialGrid& grid, std::span<const double> phi,
                           double phi_at_zero, double scale, double epsilon,
                           double A, double x_match,
                           const ShootOptions& opts) {
  const std::vector<double>& p = grid.points;
  BranchResult br;
  br.u.assign(grid.size(), 0.0);
  br.v.assign(grid.size(), 0.0);
  Rhs rhs{grid, phi, phi_at_zero, scale, epsilon};
  double x0 = std::min(opts.x_series, x_match);
  for (std::size_t i = 0; i < p.size() && p[i] <= x0; ++i)
    series_uv(A, epsilon, scale * phi_at_zero, p[i], br.u[i], br.v[i]);
  double y[2];
  series_uv(A, epsilon, scale * phi_at_zero, x0, y[0], y[1]);
  if (x0 < x_match) integrate_span(rhs, x0, x_match, y, opts.ode_rtol, br.u, br.v);
  br.u_at_match = y[0];
  br.v_at_match = y[1];
  std::size_t m =
      std::upper_bound(p.begin(), p.end(), x_match * (1.0 + 1e-14)) -
      p.begin();
  br.nodes_u = count_sign_changes(std::span<const double>(br.u.data(), m));
  return br;
}

BranchResult sweep_inward(const RadialGrid& grid, std::span<const double> phi,
                          double phi_at_zero, double scale, double epsilon,
                          double A1, double x_match, const ShootOptions& opts) {
  if (!(epsilon > -1.0 && epsilon < 1.0))
    throw SolverError(Kind::invalid_argument,
                      "epsilon must lie in (-1, 1) for a decaying tail");
  const std::vector<double>& p = grid.points;
  BranchResult br;
  br.u.assign(grid.size(), 0.0);
  br.v.assign(grid.size(), 0.0);
  Rhs rhs{grid, phi, phi_at_zero, scale, epsilon};
  double y[2];
  y[0] = A1;
  y[1] = -A1 * std::sqrt((1.0 - epsilon) / (1.0 + epsilon));
  br.u.back() = y[0];
  br.v.back() = y[1];
  integrate_span(rhs, grid.x_max, x_match, y, opts.ode_rtol, br.u, br.v);
  br.u_at_match = y[0];
  br.v_at_match = y[1];
  std::size_t first =
      std::lower_bound(p.begin(), p.end(), x_match * (1.0 - 1e-14)) -
      p.begin();
  br.nodes_u = count_sign_changes(
      std::span<const double>(br.u.data() + first, p.size() - first));
  return br;
}

}  // namespace

BranchResult integrate_outward(const RadialGrid& grid,
                               const PotentialProfile& potential,
                               double epsilon, double A, double x_match,
                               const ShootOptions& opts) {
  check_potential(grid, potential.phi);
  if (!(x_match > grid.x_min && x_match <= grid.x_max))
    throw SolverError(Kind::invalid_argument,
                      "x_match must lie inside the grid");
  return sweep_outward(grid, potential.phi, potential.phi_at_zero, 1.0,
                       epsilon, A, x_match, opts);
}

BranchResult integrate_inward(const RadialGrid& grid,
                              const PotentialProfile& potential,
                              double epsilon, double A1, double x_match,
                              const ShootOptions& opts) {
  check_potential(grid, potential.phi);
  if (!(x_match >= grid.x_min && x_match < grid.x_max))
    throw SolverError(Kind::invalid_argument,
                      "x_match must lie inside the grid");
  return sweep_inward(grid, potential.phi, potential.phi_at_zero, 1.0, epsilon,
                      A1, x_match, opts);
}

int count_sign_changes(std::span<const double> samples) {
  int count = 0, last = 0;
  for (double s : samples) {
    int sign = (s > 0.0) - (s < 0.0);
    if (sign == 0) continue;
    if (last != 0 && sign != last) ++count;
    last = sign;
  }
  return count;
}

ShootResult shoot_match(const RadialGrid& grid,
                        const PotentialProfile& potential, ShootUnknown unknown,
                        int target_nodes, const ShootOptions& opts) {
  check_potential(grid, potential.phi);
  if (target_nodes < 0)
    throw SolverError(Kind::invalid_argument, "target_nodes must be >= 0");
  double phimax = 0.0;
  for (double f : potential.phi) phimax = std::max(phimax, std::fabs(f));
  if (phimax == 0.0)
    throw SolverError(Kind::invalid_argument,
                      "potential profile is identically zero");

  struct Eval {
    double D;
    BranchResult out, in;
  };
  auto eval = [&](double lambda) -> Eval {
    double eps = (unknown == ShootUnknown::epsilon) ? lambda : 0.0;
    double scale = (unknown == ShootUnknown::potential_scale) ? lambda : 1.0;
    Eval e;
    e.out = sweep_outward(grid, potential.phi, potential.phi_at_zero, scale,
                          eps, 1.0, opts.x_match, opts);
    e.in = sweep_inward(grid, potential.phi, potential.phi_at_zero, scale, eps,
                        1.0, opts.x_match, opts);
    double no = std::hypot(e.out.u_at_match, e.out.v_at_match);
    double ni = std::hypot(e.in.u_at_match, e.in.v_at_match);
    e.D = (e.out.u_at_match * e.in.v_at_match -
           e.out.v_at_match * e.in.u_at_match) /
          (no * ni);
    return e;
  };

  auto refine = [&](double lo, double hi, double Dlo, double Dhi) -> double {
    while (hi - lo > 1e-6 * std::max(1.0, std::fabs(lo) + std::fabs(hi))) {
      double mid = 0.5 * (lo + hi);
      double Dm = eval(mid).D;
      if (Dm == 0.0) return mid;
      if ((Dm < 0.0) == (Dlo < 0.0)) {
        lo = mid;
        Dlo = Dm;
      } else {
        hi = mid;
        Dhi = Dm;
      }
    }
    double x0 = lo, x1 = hi, f0 = Dlo, f1 = Dhi;
    for (int it = 0; it < 60; ++it) {
      double x2 = (f1 != f0) ? x1 - f1 * (x1 - x0) / (f1 - f0)
                             : 0.5 * (lo + hi);
      if (!(x2 > lo && x2 < hi)) x2 = 0.5 * (lo + hi);
      double f2 = eval(x2).D;
      if ((f2 < 0.0) == (Dlo < 0.0)) {
        lo = x2;
        Dlo = f2;
      } else {
        hi = x2;
        Dhi = f2;
      }
      x0 = x1;
      f0 = f1;
      x1 = x2;
      f1 = f2;
      if (f2 == 0.0 ||
          std::fabs(x1 - x0) < opts.root_tol * std::max(1.0, std::fabs(x1)))
        break;
    }
    return x1;
  };

  auto build = [&](double lambda) -> ShootResult {
    Eval e = eval(lambda);
    const std::vector<double>& p = grid.points;
    const std::size_t n = p.size();
    double denom = e.in.u_at_match * e.in.u_at_match +
                   e.in.v_at_match * e.in.v_at_match;
    double s = (e.out.u_at_match * e.in.u_at_match +
                e.out.v_at_match * e.in.v_at_match) /
               denom;
    ShootResult r;
    r.state.u.resize(n);
    r.state.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (p[i] <= opts.x_match) {
        r.state.u[i] = e.out.u[i];
        r.state.v[i] = e.out.v[i];
      } else {
        r.state.u[i] = s * e.in.u[i];
        r.state.v[i] = s * e.in.v[i];
      }
    }
    std::vector<double> dens(n);
    for (std::size_t i = 0; i < n; ++i)
      dens[i] = r.state.u[i] * r.state.u[i] + r.state.v[i] * r.state.v[i];
    double norm = integrate(grid, dens);
    double inv = 1.0 / std::sqrt(norm);
    double sgn = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::fabs(r.state.u[i]) > 0.0) {
        sgn = (r.state.u[i] > 0.0) ? 1.0 : -1.0;
        break;
      }
    for (std::size_t i = 0; i < n; ++i) {
      r.state.u[i] *= sgn * inv;
      r.state.v[i] *= sgn * inv;
      dens[i] *= inv * inv;
    }
    r.state.norm = integrate(grid, dens);
    r.state.nodes_u = count_sign_changes(r.state.u);
    r.state.epsilon = (unknown == ShootUnknown::epsilon) ? lambda : 0.0;
    r.asym.A = sgn * inv;
    r.asym.A1 = sgn * s * inv;
    r.unknown = lambda;
    r.mismatch = std::fabs(e.D);
    return r;
  };

  auto scan = [&](double lo, double hi, ShootResult* out,
                  std::vector<int>* seen) -> bool {
    int m = std::max(opts.scan_points, 8);
    double prevx = lo, prevD = eval(lo).D;
    bool found = false;
    for (int i = 1; i <= m && !found; ++i) {
      double xc = lo + (hi - lo) * double(i) / double(m);
      double Dc = eval(xc).D;
      double root = 0.0;
      bool have = false;
      if (prevD == 0.0) {
        root = prevx;
        have = true;
      } else if (std::isfinite(prevD) && std::isfinite(Dc) &&
                 (prevD < 0.0) != (Dc < 0.0)) {
        root = refine(prevx, xc, prevD, Dc);
        have = true;
      }
      if (have) {
        ShootResult cand = build(root);
        seen->push_back(cand.state.nodes_u);
        if (cand.state.nodes_u == target_nodes) {
          *out = std::move(cand);
          found = true;
        }
      }
      prevx = xc;
      prevD = Dc;
    }
    return found;
  };

  double def_lo = (unknown == ShootUnknown::epsilon) ? -0.95 : -9.0;
  double def_hi = (unknown == ShootUnknown::epsilon) ? 0.995 : -0.15;
  bool user_bracket = opts.bracket_lo < opts.bracket_hi;

  ShootResult res;
  std::vector<int> seen;
  bool ok = false;
  if (user_bracket) ok = scan(opts.bracket_lo, opts.bracket_hi, &res, &seen);
  if (!ok && !(user_bracket && opts.bracket_lo == def_lo &&
               opts.bracket_hi == def_hi))
    ok = scan(def_lo, def_hi, &res, &seen);
  if (!ok) {
    std::ostringstream msg;
    if (seen.empty()) {
      msg << "no root bracketed in [" << def_lo << ", " << def_hi << "] with "
          << std::max(opts.scan_points, 8) << " scan points";
      throw SolverError(Kind::no_root, msg.str());
    }
    msg << "roots found with node counts {";
    for (std::size_t i = 0; i < seen.size(); ++i)
      msg << (i ? ", " : "") << seen[i];
    msg << "} but target was " << target_nodes;
    throw SolverError(Kind::wrong_node_count, msg.str());
  }
  return res;
}

}  // namespace selfloc
