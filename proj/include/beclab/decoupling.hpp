#pragma once

// Electron-phonon coupling on a truncated fermion x boson space: the dressing
// unitary V = exp(i alpha S) and numerical checks of the operator identity,
// the unitary equivalence and the factorization of the coupled Gibbs state.

#include "beclab/dispersion.hpp"
#include "beclab/hubbard.hpp"
#include "beclab/linalg.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace beclab {

/// A lattice mode k in (2 pi / L) Z^d and its cell volume (2 pi / L)^d.
struct ModeSample {
  std::array<double, 3> k{0.0, 0.0, 0.0};
  double weight = 0.0;
};

/// The `count` nonzero lattice modes of smallest |n|^2 with |k| >= kappa.
/// Ties go to the lexicographically larger n, so (1,0,0) precedes (0,1,0).
std::vector<ModeSample> select_lattice_modes(double box_size, int dim, double kappa, int count);

struct CoupledSystem {
  HubbardSystem hubbard;
  CouplingFamily family;
  Dispersion dispersion;
  std::vector<ModeSample> modes;
  double kappa = 0.0;
  Eigen::Index dimension_cap = 20000;

  int num_modes() const { return static_cast<int>(modes.size()); }
  /// h_j = omega(|k_j|) - mu_b.
  std::vector<double> mode_energies() const;
  /// g(x, j) = lambda_x^kappa(k_j) sqrt(weight_j).
  CMatrix mode_couplings() const;
  /// G_xy = sum_j h_j^{2m} conj(g_xj) g_yj, the overlap on the same mode set.
  CMatrix discrete_overlap(double m) const;
  /// w_x = Re sum_j conj(f_j) g_xj / h_j for f given on the mode set.
  std::vector<double> discrete_weights(std::span<const Complex> f) const;
  /// Fermion dimension times (level_cap + 1)^M; throws DimensionCapExceeded above the cap.
  Eigen::Index total_dimension(int level_cap) const;
};

/// Validates N_i = 1, kappa > 0, matching dimensions and h_j > 0.
void check_coupled_system(const CoupledSystem& sys);

struct CoupledOperators {
  int level_cap = 0;
  CMatrix H_full;
  CMatrix H_fr;
  CMatrix H_I;
  CMatrix S;
  CMatrix V;
  CMatrix H_eff_tilde;
  CMatrix H_b;  // boson factor alone
};

/// Dense operators on sector x truncated Fock space (fermion index slow).
/// V is assembled block by block: on the fermion basis state nu it is
/// W(alpha u_nu) with u_nu = sum_x nu_x i g_x / h.
CoupledOperators build_coupled_operators(const CoupledSystem& sys, int level_cap);

/// ||V^dagger V - I||_F.
double unitarity_defect(const CMatrix& v);

/// Nonincreasing up to an absolute floor of 1e-12.
bool monotone_nonincreasing(std::span<const double> values, double floor = 1e-12);

struct IdentityPoint {
  int level_cap = 0;
  int restricted_cap = 0;
  double residual = 0.0;  // ||P (V H_b V^-1 - rhs) P||_F / ||P rhs P||_F
  double unitarity = 0.0;
};

struct IdentityLadder {
  std::vector<IdentityPoint> points;
  bool monotone = false;
};

/// V (1 x H_b) V^-1 against 1 x H_b + alpha H_I + (alpha^2 / 2) R_{-1/2} x 1,
/// restricted to boson occupations <= floor(level_cap / 2).
IdentityLadder verify_dressing_identity(const CoupledSystem& sys, std::span<const int> level_caps);

struct SpectralPoint {
  int level_cap = 0;
  std::vector<double> coupled;    // lowest levels of H_full
  std::vector<double> decoupled;  // lowest levels of H~_e x 1 + 1 x H_b
  std::vector<double> gaps;
  double max_gap = 0.0;
  Eigen::Index dimension = 0;
};

struct SpectralLadder {
  std::vector<SpectralPoint> points;
  bool monotone = false;
};

SpectralLadder verify_spectral_equivalence(const CoupledSystem& sys, std::span<const int> level_caps,
                                           int levels = 5);

struct FactorizationPoint {
  int level_cap = 0;
  Complex lhs;
  Complex rhs;
  double gap = 0.0;
};

struct FactorizationLadder {
  std::vector<FactorizationPoint> points;
  bool monotone = false;
};

/// lhs = Tr[(A_e x W(f)) e^{-beta H_full}] / Z; rhs = psi~_e(exp(-i alpha ntilde(f)) A_e)
/// times the truncated free-boson value of W(f). f is given on the mode set.
FactorizationLadder verify_factorization(const CoupledSystem& sys, const CMatrix& a_e,
                                         std::span<const Complex> f, std::span<const int> level_caps);

struct FactorizationCase {
  CMatrix a_e;
  std::vector<Complex> f;
};

/// Several cases sharing one diagonalization per level cap.
std::vector<FactorizationLadder> verify_factorization(const CoupledSystem& sys,
                                                      std::span<const FactorizationCase> cases,
                                                      std::span<const int> level_caps);

/// Tr[e^{itH} X e^{-itH} e^{-beta H}] / Z - Tr[X e^{-beta H}] / Z in absolute value.
double gibbs_invariance_defect(const CMatrix& h, const CMatrix& x, double beta, double t);

}  // namespace beclab
