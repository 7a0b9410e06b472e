#include "beclab/linalg.hpp"

#include "beclab/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace beclab {

FermionSector::FermionSector(int num_sites, int num_electrons)
    : num_sites_(num_sites), num_electrons_(num_electrons) {
  if (num_sites < 1 || num_sites > 16) {
    throw DomainError("fermion sector: number of sites must be in [1, 16], got " +
                      std::to_string(num_sites));
  }
  if (num_electrons < 0 || num_electrons > 2 * num_sites) {
    throw DomainError("fermion sector: electron number " + std::to_string(num_electrons) +
                      " outside [0, " + std::to_string(2 * num_sites) + "]");
  }
  const std::uint64_t limit = std::uint64_t{1} << (2 * num_sites);
  for (std::uint64_t s = 0; s < limit; ++s) {
    if (std::popcount(s) == num_electrons) basis_.push_back(s);
  }
}

std::optional<Eigen::Index> FermionSector::index_of(std::uint64_t state) const {
  auto it = std::lower_bound(basis_.begin(), basis_.end(), state);
  if (it == basis_.end() || *it != state) return std::nullopt;
  return static_cast<Eigen::Index>(it - basis_.begin());
}

FermionSector build_fermion_sector(int num_sites, int num_electrons) {
  return FermionSector(num_sites, num_electrons);
}

namespace {

int jordan_wigner_sign(std::uint64_t state, int mode) {
  const std::uint64_t below = state & ((std::uint64_t{1} << mode) - 1);
  return (std::popcount(below) % 2 == 0) ? 1 : -1;
}

void check_site(const FermionSector& sector, int site) {
  if (site < 0 || site >= sector.num_sites()) {
    throw DomainError("site index " + std::to_string(site) + " outside lattice of " +
                      std::to_string(sector.num_sites()) + " sites");
  }
}

}  // namespace

LadderAction apply_annihilation(std::uint64_t state, int mode) {
  const std::uint64_t bit = std::uint64_t{1} << mode;
  if ((state & bit) == 0) return {};
  return {state ^ bit, jordan_wigner_sign(state, mode)};
}

LadderAction apply_creation(std::uint64_t state, int mode) {
  const std::uint64_t bit = std::uint64_t{1} << mode;
  if ((state & bit) != 0) return {};
  return {state | bit, jordan_wigner_sign(state, mode)};
}

double hermiticity_defect(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(CMatrix matrix, double rel_tol) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw ContractViolation("Hermitian operator must be square");
  }
  const double scale = matrix_.size() == 0 ? 0.0 : matrix_.cwiseAbs().maxCoeff();
  const double defect = hermiticity_defect(matrix_);
  if (defect > rel_tol * scale) {
    throw ContractViolation("matrix is not Hermitian: max|A - A^dagger| = " +
                            std::to_string(defect) + ", max|A| = " + std::to_string(scale));
  }
  matrix_ = 0.5 * (matrix_ + matrix_.adjoint()).eval();
}

HermitianOperator HermitianOperator::from_symmetrized(const CMatrix& matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw ContractViolation("Hermitian operator must be square");
  }
  return HermitianOperator(CMatrix(0.5 * (matrix + matrix.adjoint())), Unchecked{});
}

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator::from_symmetrized(a.matrix() + b.matrix());
}

HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator::from_symmetrized(a.matrix() - b.matrix());
}

HermitianOperator operator*(double s, const HermitianOperator& a) {
  return HermitianOperator::from_symmetrized(s * a.matrix());
}

HermitianOperator number_operator(const FermionSector& sector, int site, Spin spin) {
  check_site(sector, site);
  const int mode = fermion_mode(site, spin);
  CMatrix m = CMatrix::Zero(sector.dim(), sector.dim());
  const auto basis = sector.basis();
  for (Eigen::Index i = 0; i < sector.dim(); ++i) {
    if (basis[i] & (std::uint64_t{1} << mode)) m(i, i) = 1.0;
  }
  return HermitianOperator(std::move(m));
}

HermitianOperator site_density(const FermionSector& sector, int site) {
  return number_operator(sector, site, Spin::up) + number_operator(sector, site, Spin::down);
}

CMatrix hopping_operator(const FermionSector& sector, int site_to, Spin spin_to, int site_from,
                         Spin spin_from) {
  check_site(sector, site_to);
  check_site(sector, site_from);
  const int to = fermion_mode(site_to, spin_to);
  const int from = fermion_mode(site_from, spin_from);
  CMatrix m = CMatrix::Zero(sector.dim(), sector.dim());
  const auto basis = sector.basis();
  for (Eigen::Index j = 0; j < sector.dim(); ++j) {
    const LadderAction a = apply_annihilation(basis[j], from);
    if (a.sign == 0) continue;
    const LadderAction c = apply_creation(a.state, to);
    if (c.sign == 0) continue;
    const auto i = sector.index_of(c.state);
    m(*i, j) += static_cast<double>(a.sign * c.sign);
  }
  return m;
}

CMatrix fock_annihilation(int num_modes, int mode) {
  if (num_modes < 1 || num_modes > 20 || mode < 0 || mode >= num_modes) {
    throw DomainError("fock_annihilation: invalid mode layout");
  }
  const Eigen::Index dim = Eigen::Index{1} << num_modes;
  CMatrix m = CMatrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    const LadderAction a = apply_annihilation(static_cast<std::uint64_t>(s), mode);
    if (a.sign != 0) m(static_cast<Eigen::Index>(a.state), s) = static_cast<double>(a.sign);
  }
  return m;
}

Spectrum spectral_decomposition(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigendecomposition failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

CMatrix apply_function(const Spectrum& spectrum, const std::function<Complex(double)>& g) {
  const auto n = spectrum.eigenvalues.size();
  CVector diag(n);
  for (Eigen::Index i = 0; i < n; ++i) diag(i) = g(spectrum.eigenvalues(i));
  return spectrum.eigenvectors * diag.asDiagonal() * spectrum.eigenvectors.adjoint();
}

CMatrix exp_hermitian(const HermitianOperator& h, Complex scale) {
  return apply_function(spectral_decomposition(h),
                        [scale](double lambda) { return std::exp(scale * lambda); });
}

GibbsState gibbs(const Spectrum& spectrum, double beta) {
  if (!(beta > 0.0)) throw DomainError("gibbs: inverse temperature must be positive");
  const RVector& e = spectrum.eigenvalues;
  const double e0 = e.minCoeff();
  RVector w = (-beta * (e.array() - e0)).exp();
  const double shifted_z = w.sum();
  w /= shifted_z;
  GibbsState out;
  out.density = spectrum.eigenvectors * w.cast<Complex>().asDiagonal() *
                spectrum.eigenvectors.adjoint();
  out.log_partition = std::log(shifted_z) - beta * e0;
  out.partition_function = std::exp(out.log_partition);
  return out;
}

GibbsState gibbs(const HermitianOperator& h, double beta) {
  return gibbs(spectral_decomposition(h), beta);
}

Complex expectation(const CMatrix& density, const CMatrix& observable) {
  if (density.rows() != observable.rows() || density.cols() != observable.cols()) {
    throw DomainError("expectation: dimension mismatch between state and observable");
  }
  // Tr[A rho] = sum_ij A_ij rho_ji
  return (observable.cwiseProduct(density.transpose())).sum();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

TruncatedBosonSpace::TruncatedBosonSpace(std::vector<BosonMode> modes, int level_cap)
    : modes_(std::move(modes)), level_cap_(level_cap) {
  if (level_cap < 1) {
    throw DomainError("truncated boson space: level cap must be >= 1, got " +
                      std::to_string(level_cap));
  }
  if (modes_.empty()) throw DomainError("truncated boson space: need at least one mode");
  for (const auto& m : modes_) {
    if (!(m.frequency >= 0.0)) throw DomainError("truncated boson space: negative frequency");
  }
  double d = std::pow(static_cast<double>(level_cap + 1), static_cast<double>(modes_.size()));
  if (d > 1e6) throw DimensionCapExceeded("truncated boson space larger than 10^6 states");
  dim_ = static_cast<Eigen::Index>(std::llround(d));
}

int TruncatedBosonSpace::occupation(Eigen::Index state, int mode) const {
  for (int j = 0; j < mode; ++j) state /= (level_cap_ + 1);
  return static_cast<int>(state % (level_cap_ + 1));
}

CMatrix TruncatedBosonSpace::annihilation(int mode) const {
  if (mode < 0 || mode >= num_modes()) throw DomainError("boson mode index out of range");
  Eigen::Index stride = 1;
  for (int j = 0; j < mode; ++j) stride *= (level_cap_ + 1);
  CMatrix a = CMatrix::Zero(dim_, dim_);
  for (Eigen::Index s = 0; s < dim_; ++s) {
    const int n = occupation(s, mode);
    if (n > 0) a(s - stride, s) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

HermitianOperator TruncatedBosonSpace::number(int mode) const {
  if (mode < 0 || mode >= num_modes()) throw DomainError("boson mode index out of range");
  CMatrix m = CMatrix::Zero(dim_, dim_);
  for (Eigen::Index s = 0; s < dim_; ++s) m(s, s) = occupation(s, mode);
  return HermitianOperator(std::move(m));
}

HermitianOperator TruncatedBosonSpace::total_number() const {
  std::vector<double> ones(modes_.size(), 1.0);
  return second_quantize(ones);
}

HermitianOperator TruncatedBosonSpace::second_quantize(std::span<const double> energies) const {
  if (static_cast<int>(energies.size()) != num_modes()) {
    throw DomainError("second_quantize: one energy per mode required");
  }
  CMatrix m = CMatrix::Zero(dim_, dim_);
  for (Eigen::Index s = 0; s < dim_; ++s) {
    double e = 0.0;
    for (int j = 0; j < num_modes(); ++j) e += energies[j] * occupation(s, j);
    m(s, s) = e;
  }
  return HermitianOperator(std::move(m));
}

CMatrix TruncatedBosonSpace::annihilation(std::span<const Complex> f) const {
  if (static_cast<int>(f.size()) != num_modes()) {
    throw DomainError("annihilation(f): one coefficient per mode required");
  }
  CMatrix a = CMatrix::Zero(dim_, dim_);
  for (int j = 0; j < num_modes(); ++j) {
    if (f[j] != Complex{}) a += std::conj(f[j]) * annihilation(j);
  }
  return a;
}

HermitianOperator TruncatedBosonSpace::field(std::span<const Complex> f) const {
  const CMatrix a = annihilation(f);
  return HermitianOperator::from_symmetrized((a + a.adjoint()) / std::sqrt(2.0));
}

CMatrix TruncatedBosonSpace::weyl(std::span<const Complex> f) const {
  if (std::all_of(f.begin(), f.end(), [](Complex z) { return z == Complex{}; })) {
    return CMatrix::Identity(dim_, dim_);
  }
  return exp_hermitian(field(f), Complex(0.0, 1.0));
}

std::vector<bool> TruncatedBosonSpace::occupation_mask(int cap) const {
  std::vector<bool> mask(static_cast<std::size_t>(dim_), true);
  for (Eigen::Index s = 0; s < dim_; ++s) {
    for (int j = 0; j < num_modes(); ++j) {
      if (occupation(s, j) > cap) {
        mask[static_cast<std::size_t>(s)] = false;
        break;
      }
    }
  }
  return mask;
}

TruncatedBosonSpace build_truncated_boson_space(std::vector<BosonMode> modes, int level_cap) {
  return TruncatedBosonSpace(std::move(modes), level_cap);
}

}  // namespace beclab
