#pragma once

// Free phonon gas in a box of side L: lattice mode sums over (2 pi / L) Z^d,
// the exact finite-volume boson number and its continuum densities.

#include "beclab/dispersion.hpp"
#include "beclab/test_function.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace beclab {

/// All lattice modes sharing |n|^2, n in Z^d.
struct ModeShell {
  std::int64_t norm2 = 0;
  double k = 0.0;
  std::int64_t count = 0;              // modes in the shell
  std::int64_t count_all_nonzero = 0;  // of which every coordinate is nonzero
  double gap = 0.0;                    // F(k)
  double boltzmann = 0.0;              // exp(-beta F(k))
};

/// Retained modes of Gamma_L^d: every k with exp(-beta F(k)) >= rel_cut times
/// its value at the smallest nonzero mode, grouped into radial shells.
class LatticeModes {
 public:
  LatticeModes(double box_size, const Dispersion& disp, double beta, double rel_cut = 1e-16);

  double box_size() const { return box_size_; }
  double spacing() const { return spacing_; }
  int dim() const { return disp_.dim(); }
  int internal_components() const { return disp_.internal_components(); }
  double beta() const { return beta_; }
  const Dispersion& dispersion() const { return disp_; }
  double volume() const;

  /// Nonzero shells, ascending in |n|^2.
  const std::vector<ModeShell>& shells() const { return shells_; }
  std::int64_t cutoff_norm2() const { return cutoff_norm2_; }
  std::int64_t num_modes() const;  // including k = 0

  /// sum over retained k (including 0) of exp(-beta F(k)).
  double boltzmann_sum() const;
  /// Estimate of the same sum over the excluded modes.
  double tail_bound() const;

  /// Calls fn(n, k) for every retained nonzero mode with |k_i - center_i| <= half_width_i.
  void for_each_mode_in_box(const std::array<double, 3>& center, const std::array<double, 3>& half_width,
                            const std::function<void(const std::array<int, 3>&,
                                                     const std::array<double, 3>&)>& fn) const;

 private:
  double box_size_;
  double beta_;
  Dispersion disp_;
  double spacing_;
  std::int64_t cutoff_norm2_ = 0;
  std::vector<ModeShell> shells_;
};

/// Bose occupation 1/(y e^{x} - 1) with y = 1 + s, accurate for small s and x.
double bose_factor(double s, double x);

/// Boson numbers in the box. r_bL and R_bL are numbers, not densities, and
/// partition N_b_L_1 exactly: r over modes with every coordinate nonzero, R
/// over the remaining nonzero modes.
struct BosonNumber {
  double N_b_L = 0.0;
  double N_b_0 = 0.0;
  double N_b_L_1 = 0.0;
  double r_bL = 0.0;
  double R_bL = 0.0;
};

BosonNumber boson_number_finite(const LatticeModes& modes, double y, double n_ir);
/// Same with the fugacity given as s = y - 1 > 0.
BosonNumber boson_number_offset(const LatticeModes& modes, double s, double n_ir);

/// Surface-weighted radial Bose integral int_{R^dim} (y e^{beta F(|k|)} - 1)^{-1} dk, y = 1 + s.
/// Throws InfraredDivergence at s = 0 when it diverges.
double bose_integral(const Dispersion& disp, double beta, double s, int dim);

/// rho_fr(beta, y) = N_i (2 pi)^{-d} int (y e^{beta F} - 1)^{-1} dk.
double rho_fr(const Dispersion& disp, double beta, double y);
double rho_fr_offset(const Dispersion& disp, double beta, double s);

/// rho_fr(beta, 1).
double rho_crit(const Dispersion& disp, double beta);

/// Finite-volume quadratic form of the free Gibbs state, split into the zero
/// mode (I1) and the rest (I2). The Weyl expectation is exp(-I_L / 4).
struct CharacteristicSplit {
  double I_L = 0.0;
  double I1 = 0.0;
  double I2 = 0.0;
  double weyl = 1.0;
};

CharacteristicSplit finite_volume_characteristic(const LatticeModes& modes, const TestFunction& f,
                                                 double y_L);
CharacteristicSplit finite_volume_characteristic_offset(const LatticeModes& modes,
                                                        const TestFunction& f, double s_L);

}  // namespace beclab
