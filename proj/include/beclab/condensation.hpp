#pragma once

// Fugacity equation in a finite box, the thermodynamic phase of the free
// phonon gas and the condensate density along growing boxes.

#include "beclab/dispersion.hpp"
#include "beclab/phonon_gas.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace beclab {

struct RootResult {
  double x = 0.0;
  double residual = 0.0;  // |g(x)|
  int evaluations = 0;
};

/// Root of a monotone g on [lo, hi] with a sign change: bisection (geometric
/// when log_scale) down to relative width 1e-6, then Illinois-safeguarded
/// secant until |g| <= f_tol or the bracket is below x_tol relative.
RootResult bracketed_root(const std::function<double(double)>& g, double lo, double hi, double f_tol,
                          double x_tol = 1e-15, bool log_scale = false);

struct FugacitySolution {
  double L = 0.0;
  double y = 1.0;
  double s = 0.0;  // y - 1, kept separately for precision near the pole
  double residual = 0.0;
  double bracket_bound = 0.0;
  double target_density = 0.0;
  double infrared_density = 0.0;
};

/// f_L(y) = N_b_L(y) / L^d with y = 1 + s.
double lattice_density(const LatticeModes& modes, double s, double n_ir);

/// [N_i / (rho_bar - rho_ir)] L^{-d} (1 + sum_k exp(-beta F(k))), an upper bound on y_L - 1.
double fugacity_bracket_bound(const LatticeModes& modes, double rho_bar, double n_ir);

/// C = (N_i / L^d) a^{-2} sum_k exp(-beta F(k)): Lipschitz constant of f_L on [1 + a, inf).
double lattice_lipschitz_constant(const LatticeModes& modes, double a);

/// Unique y_L > 1 with f_L(y_L) = rho_bar. Throws UnsolvableDensity if rho_bar <= n_ir / L^d.
FugacitySolution solve_fugacity(const LatticeModes& modes, double rho_bar, double n_ir);
FugacitySolution solve_fugacity(double L, double rho_bar, double beta, const Dispersion& disp,
                                double n_ir);

enum class Phase { condensed, normal, critical };
std::string to_string(Phase p);

struct PhaseReport {
  Phase phase = Phase::normal;
  double y_infinity = 1.0;
  double normal_fugacity = 1.0;  // b; 1 unless normal
  double condensate_density = 0.0;
  double rho_crit = 0.0;
  double residual = 0.0;  // |rho_fr(beta, b) - rho_bar| in the normal phase
};

/// Critical band |rho_bar - rho_crit| <= critical_tol.
PhaseReport classify_phase(double rho_bar, double beta, const Dispersion& disp,
                           double critical_tol = 1e-9);

struct CondensatePoint {
  double L = 0.0;
  double y = 1.0;
  double s = 0.0;
  double residual = 0.0;
  double N_b0_over_Ld = 0.0;
};

struct CondensateSequence {
  std::vector<CondensatePoint> points;
  PhaseReport phase;
  /// a of the least-squares fit a + b / L on the last three points.
  double extrapolated_limit = 0.0;
  double slope = 0.0;
};

CondensateSequence condensate_sequence(const std::vector<double>& box_sizes, double rho_bar,
                                       double beta, const Dispersion& disp, double n_ir);

/// Fit a + b / L through (L_i, v_i) by least squares; returns {a, b}.
std::pair<double, double> fit_inverse_length(const std::vector<double>& L, const std::vector<double>& v);

struct CriticalTemperature {
  double beta_c = 0.0;
  double T_c = 0.0;
  double residual = 0.0;
};

/// beta_c in [beta_lo, beta_hi] with rho_crit(beta_c) = rho_bar. Throws
/// BracketError without a sign change and DomainError if rho_crit is not
/// monotone on the sampled interval.
CriticalTemperature critical_temperature(double rho_bar, const Dispersion& disp, double beta_lo,
                                         double beta_hi);

}  // namespace beclab
