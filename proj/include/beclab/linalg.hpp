#pragma once

// Finite-dimensional Hilbert-space machinery: fixed-particle-number fermion
// sectors, per-mode truncated boson Fock spaces and dense Hermitian calculus.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace beclab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

enum class Spin { up, down };

/// Fermionic mode index under the Jordan-Wigner ordering: sites ascending,
/// spin up before spin down.
constexpr int fermion_mode(int site, Spin spin) {
  return 2 * site + (spin == Spin::down ? 1 : 0);
}

/// Antisymmetric N_e-particle space over num_sites x {up, down}.
///
/// Basis states are occupation bitstrings with mode j stored at bit j; the
/// basis is sorted by the integer value of the bitstring.
class FermionSector {
 public:
  FermionSector(int num_sites, int num_electrons);

  int num_sites() const { return num_sites_; }
  int num_electrons() const { return num_electrons_; }
  int num_modes() const { return 2 * num_sites_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis_.size()); }
  std::span<const std::uint64_t> basis() const { return basis_; }

  std::optional<Eigen::Index> index_of(std::uint64_t state) const;

 private:
  int num_sites_;
  int num_electrons_;
  std::vector<std::uint64_t> basis_;
};

FermionSector build_fermion_sector(int num_sites, int num_electrons);

/// Result of applying a single ladder operator to a basis bitstring.
struct LadderAction {
  std::uint64_t state = 0;
  int sign = 0;  // 0 means the state was annihilated
};

LadderAction apply_annihilation(std::uint64_t state, int mode);
LadderAction apply_creation(std::uint64_t state, int mode);

/// Dense Hermitian matrix; construction rejects inputs with
/// max|A - A^dagger| > rel_tol * max|A|.
class HermitianOperator {
 public:
  static constexpr double kDefaultTolerance = 1e-12;

  explicit HermitianOperator(CMatrix matrix, double rel_tol = kDefaultTolerance);

  /// Symmetrizes (A + A^dagger)/2 without validation; for matrices that are
  /// Hermitian by construction up to roundoff.
  static HermitianOperator from_symmetrized(const CMatrix& matrix);

  const CMatrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

 private:
  struct Unchecked {};
  HermitianOperator(CMatrix matrix, Unchecked) : matrix_(std::move(matrix)) {}
  CMatrix matrix_;
};

double hermiticity_defect(const CMatrix& m);

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator operator*(double s, const HermitianOperator& a);

/// Number operator n_{x,sigma} on the sector (diagonal 0/1).
HermitianOperator number_operator(const FermionSector& sector, int site, Spin spin);

/// Site density n_x = n_{x,+} + n_{x,-}.
HermitianOperator site_density(const FermionSector& sector, int site);

/// c^dagger_{x,s} c_{y,s'} with Jordan-Wigner signs on the sector basis.
CMatrix hopping_operator(const FermionSector& sector, int site_to, Spin spin_to, int site_from,
                         Spin spin_from);

/// Annihilation operator of one mode on the full 2^M fermionic Fock space.
CMatrix fock_annihilation(int num_modes, int mode);

struct Spectrum {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // columns
};

Spectrum spectral_decomposition(const HermitianOperator& h);

/// g(H) = V diag(g(lambda)) V^dagger.
CMatrix apply_function(const Spectrum& spectrum, const std::function<Complex(double)>& g);

/// exp(scale * H) for a complex scale; exp(i t H) is unitary up to roundoff.
CMatrix exp_hermitian(const HermitianOperator& h, Complex scale);

struct GibbsState {
  CMatrix density;
  double partition_function;  // may overflow to inf; log_partition is always finite
  double log_partition;
};

/// rho = exp(-beta H)/Z from the eigendecomposition, shifted by the ground energy.
GibbsState gibbs(const HermitianOperator& h, double beta);
GibbsState gibbs(const Spectrum& spectrum, double beta);

/// Tr[A rho].
Complex expectation(const CMatrix& density, const CMatrix& observable);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// One boson mode of a truncated Fock space.
struct BosonMode {
  double frequency = 0.0;
  std::vector<Complex> site_couplings;
};

/// Tensor product of per-mode occupation-capped Fock spaces, dim (n_max+1)^M.
/// State index = sum_j n_j (n_max+1)^j.
class TruncatedBosonSpace {
 public:
  TruncatedBosonSpace(std::vector<BosonMode> modes, int level_cap);

  int num_modes() const { return static_cast<int>(modes_.size()); }
  int level_cap() const { return level_cap_; }
  Eigen::Index dim() const { return dim_; }
  const std::vector<BosonMode>& modes() const { return modes_; }

  int occupation(Eigen::Index state, int mode) const;

  CMatrix annihilation(int mode) const;
  CMatrix creation(int mode) const { return annihilation(mode).adjoint(); }
  HermitianOperator number(int mode) const;
  HermitianOperator total_number() const;

  /// dGamma(h) for a diagonal one-particle operator h = diag(energies).
  HermitianOperator second_quantize(std::span<const double> energies) const;

  /// a(f) = sum_j conj(f_j) a_j (antilinear in f).
  CMatrix annihilation(std::span<const Complex> f) const;

  /// Segal field phi(f) = (a(f) + a^dagger(f))/sqrt(2).
  HermitianOperator field(std::span<const Complex> f) const;

  /// Weyl operator W(f) = exp(i phi(f)).
  CMatrix weyl(std::span<const Complex> f) const;

  /// Indicator of basis states whose occupations are all <= cap.
  std::vector<bool> occupation_mask(int cap) const;

 private:
  std::vector<BosonMode> modes_;
  int level_cap_;
  Eigen::Index dim_;
};

TruncatedBosonSpace build_truncated_boson_space(std::vector<BosonMode> modes, int level_cap);

}  // namespace beclab
