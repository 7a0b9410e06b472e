#pragma once

// Quadrature rules shared by the continuum modules. Adaptive 1-d integration
// is delegated to Boost.Math (Gauss-Kronrod for smooth panels, tanh-sinh for
// panels with an integrable endpoint singularity); fixed rules for weighted
// integrals are built by Golub-Welsch.

#include "beclab/linalg.hpp"

#include <array>
#include <functional>
#include <vector>

namespace beclab::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre on [-1, 1].
Rule gauss_legendre(int n);
/// Gauss-Laguerre for the weight e^{-x} on [0, inf).
Rule gauss_laguerre(int n);
/// Gauss-Hermite for the weight e^{-x^2} on the real line.
Rule gauss_hermite(int n);
/// Equispaced rule on [0, 2 pi); spectrally accurate for smooth periodic integrands.
Rule periodic_trapezoid(int n);

/// Surface measure of the unit sphere S^{d-1}.
double sphere_area(int dim);

/// Directions and weights on S^{d-1} for d in {1, 2, 3}; weights sum to sphere_area(d).
struct SphereRule {
  int dim = 0;
  std::vector<std::array<double, 3>> directions;
  std::vector<double> weights;
};
SphereRule sphere_rule(int dim, int n_polar, int n_azimuth);

struct Result {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 61-point Gauss-Kronrod; b may be +infinity.
Result integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-13,
                 int max_depth = 20);

/// tanh-sinh; tolerates integrable endpoint singularities at a and b.
Result integrate_singular(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-13);

/// Adaptive Gauss-Kronrod (7/15) for complex integrands on a finite interval.
Complex integrate_complex(const std::function<Complex(double)>& f, double a, double b,
                          double rel_tol = 1e-12, int max_depth = 30);

struct SphericalOptions {
  int polar_nodes = 48;
  int azimuth_nodes = 96;
  double rel_tol = 1e-12;
};

/// int_{k_lo <= |k| <= k_hi} g(k) d^d k in polar coordinates, d in {1, 2, 3}:
/// adaptive in the radius, fixed product rule on the sphere.
Complex spherical_integral(int dim, double k_lo, double k_hi,
                           const std::function<Complex(const std::array<double, 3>&)>& g,
                           const SphericalOptions& opts = {});

}  // namespace beclab::quad
