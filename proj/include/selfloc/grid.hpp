#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "selfloc/error.hpp"

namespace selfloc {

enum class GridScheme { uniform, log_dense_origin };

struct RadialGrid {
  std::vector<double> points;   // strictly increasing, all > 0
  std::vector<double> weights;  // quadrature weights per node
  double x_min = 0.0;
  double x_max = 0.0;

  std::size_t size() const { return points.size(); }
};

// Nodes on [x_min, x_max] with composite cubic quadrature weights (exact for
// cubics on arbitrary spacing, 4th order on smooth integrands).
// log_dense_origin spaces nodes geometrically so the 1/x terms of the radial
// equations stay resolved near the origin.
RadialGrid build_grid(std::size_t n_points, double x_max,
                      GridScheme scheme = GridScheme::log_dense_origin,
                      double x_min = 1e-4);

double integrate(const RadialGrid& grid, std::span<const double> samples);

// Running integrals: prefix[i] = integral over [x_min, x_i],
// suffix[i] = integral over [x_i, x_max]. Same stencil order as integrate.
std::vector<double> prefix_integral(const RadialGrid& grid,
                                    std::span<const double> samples);
std::vector<double> suffix_integral(const RadialGrid& grid,
                                    std::span<const double> samples);

// Nodewise d/dx of sampled data from the local cubic through the
// surrounding 4-point stencil.
std::vector<double> derivative(const RadialGrid& grid,
                               std::span<const double> samples);

// Local cubic interpolation at x (clamped to the grid range).
double interpolate(const RadialGrid& grid, std::span<const double> samples,
                   double x);

// int x * density(x) * sin(t x) dx over the grid. Uses the plain weighted
// sum while the node spacing resolves the oscillation and switches to
// panel-wise cubic product integration (exact sine moments) for large t.
double sine_transform(const RadialGrid& grid, std::span<const double> density,
                      double t);

}  // namespace selfloc
