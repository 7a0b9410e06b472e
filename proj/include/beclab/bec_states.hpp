#pragma once

// Infinite-volume characteristic functionals of the free phonon gas, the
// fiber states psi^{r,theta} of the condensate and their mixture over chi,
// plus the finite-volume ladders that converge to them.

#include "beclab/condensation.hpp"
#include "beclab/dispersion.hpp"
#include "beclab/phonon_gas.hpp"
#include "beclab/test_function.hpp"

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace beclab {

/// Thermodynamic data shared by every functional at fixed (beta, rho_bar).
struct BecContext {
  Dispersion dispersion;
  double beta = 1.0;
  double rho_bar = 0.0;
  PhaseReport phase;
  double rho_crit = 0.0;
  double rho_0 = 0.0;  // max(rho_bar - rho_crit, 0)
  double amplitude = 0.0;  // c = 2 (2 pi)^d rho_0 / N_i
};

BecContext make_bec_context(const Dispersion& disp, double beta, double rho_bar);

/// c = 2 (2 pi)^d rho_0 / N_i.
double condensate_amplitude(double rho_0, int dim, int internal_components);

struct CondensatePhase {
  double r = 0.0;
  double theta = 0.0;  // in [0, 2 pi)
  double rho_0 = 0.0;
  double c = 0.0;
  int internal_components = 1;
  int dim = 3;
};

/// Throws DomainError unless r >= 0 and rho_0 > 0; theta is reduced mod 2 pi.
CondensatePhase make_condensate_phase(double r, double theta, double rho_0, int dim,
                                      int internal_components = 1);
CondensatePhase make_condensate_phase(const BecContext& ctx, double r, double theta);

/// int_0^inf k^{d-1} K(k) S(k) dk where S is the closed-form shell average of
/// conj(g) f. K may be integrably singular at k = 0.
Complex radial_form(const TestFunction& f, const TestFunction& g,
                    const std::function<double(double)>& kernel);

/// q0(f) = c |fhat(0)|^2, summed over components.
double q0(const TestFunction& f, double c);
/// q1(g, f) = int conj(g) f (1 + e^{-beta F}) / (1 - e^{-beta F}) dk.
Complex q1_form(const TestFunction& f, const TestFunction& g, const Dispersion& disp, double beta);
double q1(const TestFunction& f, const Dispersion& disp, double beta);
/// q2(f) = int |f|^2 (y + e^{-beta F}) / (y - e^{-beta F}) dk with y = 1 + s.
double q2_offset(const TestFunction& f, const Dispersion& disp, double beta, double s);
double q2(const TestFunction& f, const Dispersion& disp, double beta, double y_infinity);

double psi_bec(const TestFunction& f, const BecContext& ctx);
double psi_normal(const TestFunction& f, const Dispersion& disp, double beta, double y_infinity);

/// exp(i sqrt(c r) Re(e^{i theta} fhat(0))); f must live on one component.
Complex e_fingerprint(const CondensatePhase& phase, const TestFunction& f);
Complex psi_fiber(const CondensatePhase& phase, const TestFunction& f, const Dispersion& disp,
                  double beta);
/// Same, reusing a precomputed q1(f).
Complex psi_fiber(const CondensatePhase& phase, const TestFunction& f, double q1_value);

/// Product rule for chi = e^{-r} dr x d theta / (2 pi): Gauss-Laguerre in r,
/// trapezoid in theta.
struct ChiRule {
  std::vector<double> r;
  std::vector<double> r_weights;
  std::vector<double> theta;
  std::vector<double> theta_weights;
  double total_mass() const;
};

ChiRule chi_rule(int radial_nodes = 64, int angular_nodes = 256);
Complex chi_average(const ChiRule& rule, const std::function<Complex(double, double)>& fn);

struct DecompositionCheck {
  Complex mixture;
  double psi_bec = 0.0;
  double gap = 0.0;
};

/// int psi^{r,theta}(W(f)) d chi against psi_bec(W(f)).
DecompositionCheck decomposition_check(const TestFunction& f, const BecContext& ctx,
                                       const ChiRule& rule = chi_rule());

struct TwoPoint {
  Complex value;
  Complex condensate_term;  // c r fhat(0) conj(ghat(0)) / 2
  Complex thermal_term;     // <g, e^{-beta F} (1 - e^{-beta F})^{-1} f>
  Complex q1_gf;
  Complex inner_gf;
};

TwoPoint two_point(const CondensatePhase& phase, const TestFunction& f, const TestFunction& g,
                   const Dispersion& disp, double beta);

/// N_i c r / (2 (2 pi)^d) + rho_crit, i.e. r rho_0 + rho_crit.
double fiber_density(const CondensatePhase& phase, double rho_crit);
double mean_fiber_density(const BecContext& ctx, const ChiRule& rule = chi_rule());

/// |psi^{r,theta}(W(e^{i a} f)) - psi^{r,theta+a}(W(f))|.
double gauge_shift_check(const CondensatePhase& phase, const TestFunction& f, double a,
                         const Dispersion& disp, double beta);

/// Probe pair with sqrt(c) fhat_1(0) = 1 and sqrt(c) fhat_2(0) = i.
std::pair<TestFunction, TestFunction> fingerprint_probes(double c, int dim, double width = 0.5);

struct FingerprintRecovery {
  double r = 0.0;
  double theta = 0.0;
  bool theta_determined = false;
};

/// Inverts e_1 = exp(i sqrt(r) cos theta), e_2 = exp(-i sqrt(r) sin theta) on
/// the branch sqrt(r) < pi.
FingerprintRecovery fingerprint_recover(Complex e1, Complex e2);

struct RankReport {
  Eigen::Index rank = 0;
  Eigen::Index columns = 0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
};

/// Column rank of M[z, i] = exp(i sqrt(c r_i) Re(e^{i theta_i} z)) over grid
/// points z = k1 + i k2, threshold 1e-10 sigma_max.
RankReport fingerprint_rank(std::span<const std::pair<double, double>> atoms, double c,
                            std::span<const Complex> grid);

struct StationarityReport {
  double gap = 0.0;              // |psi_bec(e^{it omega} f) - psi_bec(f)|
  double zero_mode_drift = 0.0;  // |fhat_t(0)| - |fhat(0)|
  double q1_drift = 0.0;
};

StationarityReport stationarity_check(const TestFunction& f, double t, const BecContext& ctx);

struct LimitPoint {
  double L = 0.0;
  double s = 0.0;
  double I1 = 0.0;
  double I2 = 0.0;
  double gap1 = 0.0;
  double gap2 = 0.0;
};

struct LimitLadder {
  std::string regime;
  double q0_limit = 0.0;  // q0 above rho_crit, 0 otherwise
  double I2_limit = 0.0;  // q1 at or above rho_crit, q2(y_infinity) below
  std::vector<LimitPoint> points;
  bool gap1_decreasing = false;
  bool gap2_decreasing = false;
};

/// Finite-volume I_L^(1), I_L^(2) against their thermodynamic limits.
LimitLadder characteristic_limits(const TestFunction& f, const BecContext& ctx,
                                  std::span<const double> box_sizes, double n_ir = 0.0);

struct CombinedPoint {
  double L = 0.0;
  Complex finite;
  Complex limit;
  double gap = 0.0;
};

struct CombinedLadder {
  std::string regime;
  std::vector<CombinedPoint> points;
  bool decreasing = false;
};

/// electron_factor * exp(-I_L / 4) against electron_factor * (psi_bec or psi_normal).
CombinedLadder combined_limit(Complex electron_factor, const TestFunction& f, const BecContext& ctx,
                              std::span<const double> box_sizes, double n_ir = 0.0);

}  // namespace beclab
