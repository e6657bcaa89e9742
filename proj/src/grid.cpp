#include "selfloc/grid.hpp"

#include <algorithm>
#include <cmath>

#include "selfloc/error.hpp"

namespace selfloc {

namespace {

using Kind = SolverError::Kind;

// Gaussian elimination with partial pivoting for the 4x4 systems below.
// Inputs are clobbered.
void solve4(double A[4][4], double b[4], double x[4]) {
  int piv[4] = {0, 1, 2, 3};
  for (int c = 0; c < 4; ++c) {
    int best = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::fabs(A[piv[r]][c]) > std::fabs(A[piv[best]][c])) best = r;
    std::swap(piv[c], piv[best]);
    for (int r = c + 1; r < 4; ++r) {
      double f = A[piv[r]][c] / A[piv[c]][c];
      for (int k = c; k < 4; ++k) A[piv[r]][k] -= f * A[piv[c]][k];
      b[piv[r]] -= f * b[piv[c]];
    }
  }
  for (int c = 3; c >= 0; --c) {
    double s = b[piv[c]];
    for (int k = c + 1; k < 4; ++k) s -= A[piv[c]][k] * x[k];
    x[c] = s / A[piv[c]][c];
  }
}

std::size_t stencil_start(std::size_t i, std::size_t n) {
  if (i == 0) return 0;
  return std::min(i - 1, n - 4);
}

// Weights w[0..3] on samples at points[s..s+3] reproducing the integral of
// the interpolating cubic over the panel [points[k], points[k+1]]. Exact for
// cubics on arbitrary node spacing; the local coordinate is scaled to keep
// the Vandermonde solve well conditioned.
void panel_weights(const std::vector<double>& p, std::size_t k, std::size_t s,
                   double w[4]) {
  double xc = 0.5 * (p[k] + p[k + 1]);
  double scale = std::max(std::fabs(p[s] - xc), std::fabs(p[s + 3] - xc));
  double A[4][4];
  for (int i = 0; i < 4; ++i) {
    double tau = (p[s + i] - xc) / scale, tp = 1.0;
    for (int j = 0; j < 4; ++j) {
      A[j][i] = tp;
      tp *= tau;
    }
  }
  double a = (p[k] - xc) / scale, b = (p[k + 1] - xc) / scale;
  double rhs[4], pa = a, pb = b;
  for (int j = 0; j < 4; ++j) {
    rhs[j] = (pb - pa) / (j + 1);
    pa *= a;
    pb *= b;
  }
  solve4(A, rhs, w);
  for (int i = 0; i < 4; ++i) w[i] *= scale;
}

// Coefficients of the cubic through (points[s..s+3], f[s..s+3]) in the
// scaled coordinate tau = (x - x0)/scale.
void fit_cubic(const std::vector<double>& p, std::span<const double> f,
               std::size_t s, double x0, double scale, double c[4]) {
  double A[4][4], rhs[4];
  for (int i = 0; i < 4; ++i) {
    double tau = (p[s + i] - x0) / scale, tp = 1.0;
    for (int j = 0; j < 4; ++j) {
      A[i][j] = tp;
      tp *= tau;
    }
    rhs[i] = f[s + i];
  }
  solve4(A, rhs, c);
}

void check_aligned(const RadialGrid& grid, std::span<const double> samples) {
  if (samples.size() != grid.size())
    throw SolverError(Kind::invalid_argument,
                      "samples length does not match grid");
}

struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double term) {
    double y = term - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

// 5-point Gauss-Legendre on [-1, 1].
constexpr double kGlNode[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
constexpr double kGlWeight[5] = {0.2369268850561891, 0.4786286704993665,
                                 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};

}  // namespace

RadialGrid build_grid(std::size_t n_points, double x_max, GridScheme scheme,
                      double x_min) {
  if (n_points < 100)
    throw SolverError(Kind::invalid_argument, "n_points must be at least 100");
  if (!(x_max > 1.0))
    throw SolverError(Kind::invalid_argument, "x_max must exceed 1");
  if (!(x_min > 0.0) || !(x_min < x_max))
    throw SolverError(Kind::invalid_argument, "x_min must lie in (0, x_max)");

  RadialGrid g;
  g.x_min = x_min;
  g.x_max = x_max;
  const std::size_t n = n_points;
  g.points.resize(n);
  if (scheme == GridScheme::uniform) {
    double h = (x_max - x_min) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) g.points[i] = x_min + h * double(i);
  } else {
    double step = std::log(x_max / x_min) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i)
      g.points[i] = x_min * std::exp(step * double(i));
  }
  g.points.front() = x_min;
  g.points.back() = x_max;

  g.weights.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t s = stencil_start(k, n);
    double w[4];
    panel_weights(g.points, k, s, w);
    for (int i = 0; i < 4; ++i) g.weights[s + i] += w[i];
  }
  return g;
}

double integrate(const RadialGrid& grid, std::span<const double> samples) {
  check_aligned(grid, samples);
  KahanSum acc;
  for (std::size_t i = 0; i < grid.size(); ++i)
    acc.add(grid.weights[i] * samples[i]);
  return acc.s;
}

std::vector<double> prefix_integral(const RadialGrid& grid,
                                    std::span<const double> samples) {
  check_aligned(grid, samples);
  const std::size_t n = grid.size();
  std::vector<double> out(n);
  out[0] = 0.0;
  KahanSum acc;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t s = stencil_start(k, n);
    double w[4];
    panel_weights(grid.points, k, s, w);
    for (int i = 0; i < 4; ++i) acc.add(w[i] * samples[s + i]);
    out[k + 1] = acc.s;
  }
  return out;
}

std::vector<double> suffix_integral(const RadialGrid& grid,
                                    std::span<const double> samples) {
  check_aligned(grid, samples);
  const std::size_t n = grid.size();
  std::vector<double> out(n);
  out[n - 1] = 0.0;
  KahanSum acc;
  for (std::size_t k = n - 1; k-- > 0;) {
    std::size_t s = stencil_start(k, n);
    double w[4];
    panel_weights(grid.points, k, s, w);
    for (int i = 0; i < 4; ++i) acc.add(w[i] * samples[s + i]);
    out[k] = acc.s;
  }
  return out;
}

std::vector<double> derivative(const RadialGrid& grid,
                               std::span<const double> samples) {
  check_aligned(grid, samples);
  const std::size_t n = grid.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t s = stencil_start(i, n);
    double scale = std::max(std::fabs(grid.points[s] - grid.points[i]),
                            std::fabs(grid.points[s + 3] - grid.points[i]));
    double c[4];
    fit_cubic(grid.points, samples, s, grid.points[i], scale, c);
    out[i] = c[1] / scale;
  }
  return out;
}

double interpolate(const RadialGrid& grid, std::span<const double> samples,
                   double x) {
  check_aligned(grid, samples);
  const std::vector<double>& p = grid.points;
  const std::size_t n = grid.size();
  x = std::clamp(x, p.front(), p.back());
  std::size_t k = std::upper_bound(p.begin(), p.end(), x) - p.begin();
  k = (k == 0) ? 0 : k - 1;
  if (k > n - 2) k = n - 2;
  std::size_t s = stencil_start(k, n);
  double val = 0.0;
  for (int j = 0; j < 4; ++j) {
    double lj = 1.0;
    for (int m = 0; m < 4; ++m)
      if (m != j) lj *= (x - p[s + m]) / (p[s + j] - p[s + m]);
    val += samples[s + j] * lj;
  }
  return val;
}

double sine_transform(const RadialGrid& grid, std::span<const double> density,
                      double t) {
  check_aligned(grid, density);
  if (t < 0.0)
    throw SolverError(Kind::invalid_argument, "t must be non-negative");
  if (t == 0.0) return 0.0;

  const std::vector<double>& p = grid.points;
  const std::size_t n = grid.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = p[i] * density[i];

  // Panel-wise product integration: fit a cubic to g on each panel's
  // stencil and integrate cubic * sin(t x) with exact sine/cosine moments.
  // Below theta = t*w the closed moments lose digits to cancellation and a
  // 5-point Gauss rule is exact to the same order, so switch per panel.
  KahanSum acc;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t s = stencil_start(k, n);
    double xc = 0.5 * (p[k] + p[k + 1]);
    double w = 0.5 * (p[k + 1] - p[k]);
    double scale = std::max(std::fabs(p[s] - xc), std::fabs(p[s + 3] - xc));
    double c[4];
    fit_cubic(p, g, s, xc, scale, c);
    double theta = t * w;
    if (theta < 0.25) {
      double sum = 0.0;
      for (int q = 0; q < 5; ++q) {
        double sq = w * kGlNode[q];
        double tau = sq / scale, tp = 1.0, val = 0.0;
        for (int j = 0; j < 4; ++j) {
          val += c[j] * tp;
          tp *= tau;
        }
        sum += kGlWeight[q] * val * std::sin(t * (xc + sq));
      }
      acc.add(w * sum);
    } else {
      // Physical-coordinate coefficients of the fitted cubic about xc.
      double c0 = c[0];
      double c1 = c[1] / scale;
      double c2 = c[2] / (scale * scale);
      double c3 = c[3] / (scale * scale * scale);
      double sn = std::sin(theta), cs = std::cos(theta);
      double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
      double C0 = 2.0 * sn / t;
      double S1 = 2.0 * (sn - theta * cs) / t2;
      double C2 = 2.0 * (w * w * sn / t + 2.0 * w * cs / t2 - 2.0 * sn / t3);
      double S3 = 2.0 * (-w * w * w * cs / t + 3.0 * w * w * sn / t2 +
                         6.0 * w * cs / t3 - 6.0 * sn / t4);
      acc.add(std::sin(t * xc) * (c0 * C0 + c2 * C2) +
              std::cos(t * xc) * (c1 * S1 + c3 * S3));
    }
  }
  return acc.s;
}

}  // namespace selfloc
