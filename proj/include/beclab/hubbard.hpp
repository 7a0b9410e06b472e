#pragma once

// Finite Hubbard model, the electron-phonon coupling functions and the
// phonon-dressed effective electron Hamiltonian.

#include "beclab/dispersion.hpp"
#include "beclab/linalg.hpp"
#include "beclab/quadrature.hpp"
#include "beclab/test_function.hpp"

#include <array>
#include <span>
#include <vector>

namespace beclab {

/// lambda_x^kappa(k) = e^{-i k.a_x} e^{-|k|^2 / (2 Lambda^2)} 1[|k| >= kappa].
class CouplingFamily {
 public:
  CouplingFamily(std::vector<std::array<double, 3>> positions, int dim, double uv_width = 2.0);

  /// Sites at (x, 0, 0), x = 0, 1, ..., n-1.
  static CouplingFamily chain(int num_sites, int dim, double uv_width = 2.0);

  int num_sites() const { return static_cast<int>(positions_.size()); }
  int dim() const { return dim_; }
  double uv_width() const { return uv_width_; }
  const std::array<double, 3>& position(int site) const { return positions_.at(site); }
  double separation(int x, int y) const;

  double envelope(double k) const;
  Complex value(int site, const std::array<double, 3>& k, double kappa) const;
  /// Radius beyond which the squared envelope is below 1e-18.
  double uv_radius() const;

 private:
  std::vector<std::array<double, 3>> positions_;
  int dim_;
  double uv_width_;
};

/// G_xy = <omega^m lambda_x^kappa, omega^m lambda_y^kappa>.
struct OverlapMatrix {
  double power = -0.5;
  double cutoff = 0.0;
  CMatrix entries;
};

/// Radial reduction of the overlap: the plane-wave phase is averaged over the
/// sphere in closed form, leaving a 1-d integral in |k|.
Complex coupling_overlap(const CouplingFamily& family, const Dispersion& disp, double m, int x, int y,
                         double kappa);

OverlapMatrix overlap_matrix(const CouplingFamily& family, const Dispersion& disp, double m,
                             double kappa);

/// Domain conditions on the coupling functions: lambda in dom omega^{-1/2},
/// dom omega^{-1} for kappa > 0, and ||lambda^kappa - lambda||^2 for the cutoff.
ValidationReport validate_coupling(const CouplingFamily& family, const Dispersion& disp,
                                   double kappa);

struct HubbardSystem {
  FermionSector sector;
  CMatrix hopping;
  double repulsion;
  double coupling;
  double beta;

  HubbardSystem(FermionSector sector, CMatrix hopping, double repulsion, double coupling,
                double beta);

  int num_sites() const { return sector.num_sites(); }
};

/// Nearest-neighbour hopping -t on an open (or periodic) chain.
CMatrix chain_hopping(int num_sites, double t, bool periodic = false);

/// H_e = sum T_xy c^dagger_{x s} c_{y s} + U sum n_{x+} n_{x-}.
HermitianOperator build_hubbard_hamiltonian(const HubbardSystem& sys);

/// sum_{x,y} G_xy n_x n_y, diagonal in the occupation basis.
HermitianOperator density_density(const FermionSector& sector, const CMatrix& g);

/// H_e - (alpha^2 / 2) sum G_xy n_x n_y. Throws ContractViolation if G is not PSD.
HermitianOperator build_effective_hamiltonian(const HubbardSystem& sys, const CMatrix& g_half);
HermitianOperator build_effective_hamiltonian(const HubbardSystem& sys, const OverlapMatrix& overlaps);

/// Gibbs state of the effective Hamiltonian at the system's beta.
class EffectiveElectronState {
 public:
  EffectiveElectronState(const HubbardSystem& sys, const CMatrix& g_half);
  EffectiveElectronState(const HubbardSystem& sys, const OverlapMatrix& overlaps);

  const HubbardSystem& system() const { return sys_; }
  const HermitianOperator& hamiltonian() const { return hamiltonian_; }
  const GibbsState& gibbs_state() const { return gibbs_; }

  Complex expectation(const CMatrix& a) const;

  /// Diagonal operator exp(-i alpha ntilde) with ntilde = sum_x w_x n_x.
  CMatrix dressing_phase(std::span<const double> weights) const;

  /// psi_e(exp(-i alpha ntilde) A).
  Complex dressed_phase_expectation(const CMatrix& a, std::span<const double> weights) const;

 private:
  HubbardSystem sys_;
  HermitianOperator hamiltonian_;
  GibbsState gibbs_;
};

/// w_x = Re <omega^{-1/2} f, omega^{-1/2} lambda_x^kappa>, by spherical quadrature.
std::vector<double> dressing_weights(const CouplingFamily& family, const Dispersion& disp,
                                     const TestFunction& f, double kappa,
                                     const quad::SphericalOptions& opts = {});

/// N_i alpha^2 psi_e(R_{-1}).
double infrared_boson_number(const EffectiveElectronState& state, const OverlapMatrix& minus_one,
                             int internal_components);

}  // namespace beclab
