#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace memlab {

/// base^exponent for base >= 0 with the conventions 0^0 = 1 and 0^e = 0 for e > 0.
double nonneg_pow(double base, double exponent);

/// Composite trapezoid on a uniform grid with spacing h.
double trapezoid(std::span<const double> values, double h);

/// Composite trapezoid weights for n uniformly spaced points.
std::vector<double> trapezoid_weights(std::size_t n, double h);

/// Thomas algorithm. `lower[0]` and `upper[n-1]` are ignored.
/// Assumes a diagonally dominant system; no pivoting.
std::vector<double> solve_tridiagonal(std::span<const double> lower,
                                      std::span<const double> diag,
                                      std::span<const double> upper,
                                      std::span<const double> rhs);

/// Piecewise-linear interpolation on a strictly increasing abscissa.
/// Queries outside [xs.front(), xs.back()] are clamped to the end values.
double interpolate_linear(std::span<const double> xs, std::span<const double> ys, double x);

/// Uniformly spaced points on [lo, hi] (n >= 2), endpoints exact.
std::vector<double> linspace(double lo, double hi, std::size_t n);

double sup_norm(std::span<const double> values);

}  // namespace memlab
