#pragma once

#include "beclab/dispersion.hpp"
#include "beclab/linalg.hpp"

#include <array>
#include <memory>
#include <vector>

namespace beclab {

/// f_c(k) = amplitude * exp(-|k - center|^2 / (2 width^2)) on component c.
struct GaussianBump {
  std::vector<double> center;
  double width = 1.0;
  Complex amplitude{1.0, 0.0};
  int component = 0;
};

/// Momentum-space test function: a finite sum of Gaussian bumps in
/// L^2(R^d; C^{N_i}), optionally carrying the free-evolution phase e^{i t omega(k)}.
///
/// The zero-mode amplitude is fhat(0) := (2 pi)^{-d/2} int f(k) dk; for an
/// unmodulated bump it equals amplitude * width^d.
class TestFunction {
 public:
  TestFunction(int dim, std::vector<GaussianBump> bumps, int internal_components = 1);

  static TestFunction gaussian(std::vector<double> center, double width, Complex amplitude,
                               int component = 0, int internal_components = 1);

  int dim() const { return dim_; }
  int internal_components() const { return internal_components_; }
  const std::vector<GaussianBump>& bumps() const { return bumps_; }
  bool is_zero() const;
  double evolution_time() const { return time_; }

  Complex value(const std::array<double, 3>& k, int component) const;
  /// sum_c |f_c(k)|^2
  double density(const std::array<double, 3>& k) const;
  /// sum_c conj(g_c(k)) f_c(k)
  Complex cross_density(const TestFunction& g, const std::array<double, 3>& k) const;

  /// Per-component zero modes; quadrature when an evolution phase is present.
  std::vector<Complex> zero_mode() const;
  /// Zero mode of a function living on a single internal component.
  Complex zero_mode_scalar() const;
  /// sum_c |fhat_c(0)|^2
  double zero_mode_norm_squared() const;

  double norm_squared() const;
  /// <this, g> in closed form (both must share the same evolution time).
  Complex inner(const TestFunction& g) const;

  /// int over the sphere |k| = radius of sum_c conj(g_c) f_c, with the
  /// angular integral done in closed form. Evolution phases must match.
  Complex shell_average(const TestFunction& g, double radius) const;
  /// Radii where the shell profile of `this` against g changes character:
  /// 0, the edges of each bump's bulk, and the support radius.
  std::vector<double> radial_breakpoints(const TestFunction& g) const;

  /// Radius beyond which every bump is below rel * its peak.
  double support_radius(double rel = 1e-18) const;

  TestFunction scaled(Complex s) const;
  /// e^{i t omega} f, composed with any existing evolution.
  TestFunction evolved(double t, const Dispersion& disp) const;

 private:
  int dim_;
  int internal_components_;
  std::vector<GaussianBump> bumps_;
  double time_ = 0.0;
  std::shared_ptr<const Dispersion> dispersion_;
};

/// Euclidean norm of the first `dim` coordinates.
double norm(const std::array<double, 3>& k, int dim);

}  // namespace beclab
