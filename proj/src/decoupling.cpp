#include "beclab/decoupling.hpp"

#include "beclab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace beclab {

namespace {

// Sign of the electron phase in the factorized state; see verify_factorization.
constexpr double kPhaseSign = -1.0;

std::vector<double> site_occupations(const FermionSector& sector, Eigen::Index i) {
  const std::uint64_t b = sector.basis()[static_cast<std::size_t>(i)];
  std::vector<double> occ(static_cast<std::size_t>(sector.num_sites()));
  for (int x = 0; x < sector.num_sites(); ++x) {
    occ[x] = static_cast<double>(((b >> fermion_mode(x, Spin::up)) & 1U) +
                                 ((b >> fermion_mode(x, Spin::down)) & 1U));
  }
  return occ;
}

TruncatedBosonSpace boson_space(const CoupledSystem& sys, int level_cap) {
  const std::vector<double> h = sys.mode_energies();
  const CMatrix g = sys.mode_couplings();
  std::vector<BosonMode> modes;
  for (int j = 0; j < sys.num_modes(); ++j) {
    BosonMode m;
    m.frequency = h[j];
    for (int x = 0; x < g.rows(); ++x) m.site_couplings.push_back(g(x, j));
    modes.push_back(std::move(m));
  }
  return TruncatedBosonSpace(std::move(modes), level_cap);
}

std::vector<Complex> column_combination(const CMatrix& g, std::span<const double> coeff,
                                        std::span<const double> h, Complex factor) {
  std::vector<Complex> u(static_cast<std::size_t>(g.cols()), Complex{});
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index x = 0; x < g.rows(); ++x) u[j] += coeff[x] * g(x, j);
    u[j] *= factor / h[j];
  }
  return u;
}

// Per-fermion-state dressing unitary W(alpha u_nu), u_nu = sum_x nu_x i g_x / h.
CMatrix dressing_block(const TruncatedBosonSpace& space, const CMatrix& g, std::span<const double> h,
                       std::span<const double> occ, double alpha) {
  if (alpha == 0.0) return CMatrix::Identity(space.dim(), space.dim());
  const std::vector<Complex> u = column_combination(g, occ, h, Complex(0.0, alpha));
  return space.weyl(u);
}

double quadratic(const CMatrix& gmat, std::span<const double> occ) {
  double v = 0.0;
  for (Eigen::Index x = 0; x < gmat.rows(); ++x) {
    for (Eigen::Index y = 0; y < gmat.cols(); ++y) v += gmat(x, y).real() * occ[x] * occ[y];
  }
  return v;
}

}  // namespace

std::vector<ModeSample> select_lattice_modes(double box_size, int dim, double kappa, int count) {
  if (!(box_size > 0.0)) throw DomainError("select_lattice_modes: box size must be positive");
  if (dim < 1 || dim > 3) throw DomainError("select_lattice_modes: dimension must be 1, 2 or 3");
  if (count < 1) throw DomainError("select_lattice_modes: need at least one mode");
  const double dk = 2.0 * std::numbers::pi / box_size;
  const double cell = std::pow(dk, dim);
  const int min_norm = static_cast<int>(std::ceil(kappa / dk - 1e-12));
  std::vector<std::array<int, 3>> picked;
  for (int radius = std::max(1, min_norm);; ++radius) {
    std::vector<std::pair<int, std::array<int, 3>>> cand;
    const int r1 = radius, r2 = dim >= 2 ? radius : 0, r3 = dim >= 3 ? radius : 0;
    for (int a = -r1; a <= r1; ++a) {
      for (int b = -r2; b <= r2; ++b) {
        for (int c = -r3; c <= r3; ++c) {
          const int n2 = a * a + b * b + c * c;
          if (n2 == 0 || n2 > radius * radius) continue;
          if (std::sqrt(static_cast<double>(n2)) * dk < kappa) continue;
          cand.push_back({n2, {a, b, c}});
        }
      }
    }
    if (static_cast<int>(cand.size()) < count && radius < 64) continue;
    std::sort(cand.begin(), cand.end(), [](const auto& p, const auto& q) {
      if (p.first != q.first) return p.first < q.first;
      return p.second > q.second;
    });
    for (int i = 0; i < count && i < static_cast<int>(cand.size()); ++i) picked.push_back(cand[i].second);
    break;
  }
  if (static_cast<int>(picked.size()) < count) {
    throw DomainError("select_lattice_modes: not enough modes above the infrared cutoff");
  }
  std::vector<ModeSample> out;
  for (const auto& n : picked) out.push_back({{dk * n[0], dk * n[1], dk * n[2]}, cell});
  return out;
}

std::vector<double> CoupledSystem::mode_energies() const {
  std::vector<double> h;
  for (const auto& m : modes) {
    h.push_back(dispersion.omega(norm(m.k, dispersion.dim())) - dispersion.chemical_potential());
  }
  return h;
}

CMatrix CoupledSystem::mode_couplings() const {
  CMatrix g(family.num_sites(), num_modes());
  for (int x = 0; x < family.num_sites(); ++x) {
    for (int j = 0; j < num_modes(); ++j) g(x, j) = family.value(x, modes[j].k, kappa) * std::sqrt(modes[j].weight);
  }
  return g;
}

CMatrix CoupledSystem::discrete_overlap(double m) const {
  const std::vector<double> h = mode_energies();
  const CMatrix g = mode_couplings();
  CMatrix out = CMatrix::Zero(g.rows(), g.rows());
  for (Eigen::Index x = 0; x < g.rows(); ++x) {
    for (Eigen::Index y = 0; y < g.rows(); ++y) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        out(x, y) += std::pow(h[j], 2.0 * m) * std::conj(g(x, j)) * g(y, j);
      }
    }
  }
  return out;
}

std::vector<double> CoupledSystem::discrete_weights(std::span<const Complex> f) const {
  if (static_cast<int>(f.size()) != num_modes()) {
    throw DomainError("discrete_weights: test vector must have one entry per mode");
  }
  const std::vector<double> h = mode_energies();
  const CMatrix g = mode_couplings();
  std::vector<double> w(static_cast<std::size_t>(g.rows()), 0.0);
  for (Eigen::Index x = 0; x < g.rows(); ++x) {
    Complex acc{};
    for (Eigen::Index j = 0; j < g.cols(); ++j) acc += std::conj(f[j]) * g(x, j) / h[j];
    w[x] = acc.real();
  }
  return w;
}

Eigen::Index CoupledSystem::total_dimension(int level_cap) const {
  if (level_cap < 0) throw DomainError("coupled system: level cap must be nonnegative");
  double dim = static_cast<double>(hubbard.sector.dim());
  for (int j = 0; j < num_modes(); ++j) dim *= level_cap + 1.0;
  if (dim > static_cast<double>(dimension_cap)) {
    throw DimensionCapExceeded("coupled system: dimension " + std::to_string(static_cast<long long>(dim)) +
                               " exceeds the cap " + std::to_string(dimension_cap));
  }
  return static_cast<Eigen::Index>(dim);
}

void check_coupled_system(const CoupledSystem& sys) {
  if (sys.dispersion.internal_components() != 1) {
    throw DomainError("coupled system: exactly one internal component is supported");
  }
  if (!(sys.kappa > 0.0)) throw DomainError("coupled system: kappa must be positive");
  if (sys.family.num_sites() != sys.hubbard.num_sites()) {
    throw DomainError("coupled system: coupling family and lattice have different sizes");
  }
  if (sys.family.dim() != sys.dispersion.dim()) {
    throw DomainError("coupled system: coupling family and dispersion dimensions differ");
  }
  if (sys.modes.empty()) throw DomainError("coupled system: need at least one boson mode");
  for (double h : sys.mode_energies()) {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw DomainError("coupled system: every mode needs omega(k) - mu_b > 0");
    }
  }
  const CMatrix g = sys.mode_couplings();
  if (!g.allFinite()) throw DomainError("coupled system: coupling values are not finite");
}

CoupledOperators build_coupled_operators(const CoupledSystem& sys, int level_cap) {
  check_coupled_system(sys);
  sys.total_dimension(level_cap);
  const FermionSector& sector = sys.hubbard.sector;
  const double alpha = sys.hubbard.coupling;
  const TruncatedBosonSpace space = boson_space(sys, level_cap);
  const std::vector<double> h = sys.mode_energies();
  const CMatrix g = sys.mode_couplings();
  const Eigen::Index de = sector.dim(), db = space.dim();

  CoupledOperators ops;
  ops.level_cap = level_cap;
  ops.H_b = space.second_quantize(h).matrix();
  const CMatrix he = build_hubbard_hamiltonian(sys.hubbard).matrix();
  const CMatrix ie = CMatrix::Identity(de, de), ib = CMatrix::Identity(db, db);
  ops.H_fr = kron(he, ib) + kron(ie, ops.H_b);

  ops.H_I = CMatrix::Zero(de * db, de * db);
  ops.S = CMatrix::Zero(de * db, de * db);
  ops.V = CMatrix::Zero(de * db, de * db);
  for (int x = 0; x < sector.num_sites(); ++x) {
    std::vector<Complex> gx(static_cast<std::size_t>(g.cols())), sx(gx.size());
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      gx[j] = g(x, j);
      sx[j] = Complex(0.0, 1.0) * g(x, j) / h[j];
    }
    const CMatrix nx = site_density(sector, x).matrix();
    ops.H_I += kron(nx, space.field(gx).matrix());
    ops.S += kron(nx, space.field(sx).matrix());
  }
  for (Eigen::Index i = 0; i < de; ++i) {
    const std::vector<double> occ = site_occupations(sector, i);
    ops.V.block(i * db, i * db, db, db) = dressing_block(space, g, h, occ, alpha);
  }
  ops.H_full = ops.H_fr + alpha * ops.H_I;
  const CMatrix heff = build_effective_hamiltonian(sys.hubbard, sys.discrete_overlap(-0.5)).matrix();
  ops.H_eff_tilde = kron(heff, ib) + kron(ie, ops.H_b);
  return ops;
}

double unitarity_defect(const CMatrix& v) {
  return (v.adjoint() * v - CMatrix::Identity(v.rows(), v.cols())).norm();
}

bool monotone_nonincreasing(std::span<const double> values, double floor) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1] && values[i] > floor) return false;
  }
  return true;
}

IdentityLadder verify_dressing_identity(const CoupledSystem& sys, std::span<const int> level_caps) {
  check_coupled_system(sys);
  const FermionSector& sector = sys.hubbard.sector;
  const double alpha = sys.hubbard.coupling;
  const std::vector<double> h = sys.mode_energies();
  const CMatrix g = sys.mode_couplings();
  const CMatrix g_half = sys.discrete_overlap(-0.5);
  IdentityLadder out;
  std::vector<double> res;
  for (int cap : level_caps) {
    sys.total_dimension(cap);
    const TruncatedBosonSpace space = boson_space(sys, cap);
    const CMatrix hb = space.second_quantize(h).matrix();
    const std::vector<bool> mask = space.occupation_mask(cap / 2);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index s = 0; s < space.dim(); ++s) {
      if (mask[static_cast<std::size_t>(s)]) keep.push_back(s);
    }
    double num = 0.0, den = 0.0, unit = 0.0;
    for (Eigen::Index i = 0; i < sector.dim(); ++i) {
      const std::vector<double> occ = site_occupations(sector, i);
      const CMatrix v = dressing_block(space, g, h, occ, alpha);
      unit += std::pow(unitarity_defect(v), 2);
      const CMatrix lhs = v * hb * v.adjoint();
      const std::vector<Complex> gnu = column_combination(g, occ, h, 1.0);
      std::vector<Complex> field_arg(gnu.size());
      for (std::size_t j = 0; j < gnu.size(); ++j) field_arg[j] = gnu[j] * h[j];
      CMatrix rhs = hb + alpha * space.field(field_arg).matrix();
      rhs.diagonal().array() += 0.5 * alpha * alpha * quadratic(g_half, occ);
      for (Eigen::Index a : keep) {
        for (Eigen::Index b : keep) {
          num += std::norm(lhs(a, b) - rhs(a, b));
          den += std::norm(rhs(a, b));
        }
      }
    }
    IdentityPoint p;
    p.level_cap = cap;
    p.restricted_cap = cap / 2;
    p.residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    p.unitarity = std::sqrt(unit);
    out.points.push_back(p);
    res.push_back(p.residual);
  }
  out.monotone = monotone_nonincreasing(res);
  return out;
}

SpectralLadder verify_spectral_equivalence(const CoupledSystem& sys, std::span<const int> level_caps,
                                           int levels) {
  if (levels < 1) throw DomainError("spectral equivalence: need at least one level");
  SpectralLadder out;
  std::vector<double> gaps;
  for (int cap : level_caps) {
    const CoupledOperators ops = build_coupled_operators(sys, cap);
    const Spectrum a = spectral_decomposition(HermitianOperator::from_symmetrized(ops.H_full));
    const Spectrum b = spectral_decomposition(HermitianOperator::from_symmetrized(ops.H_eff_tilde));
    SpectralPoint p;
    p.level_cap = cap;
    p.dimension = a.eigenvalues.size();
    const int n = std::min<int>(levels, static_cast<int>(a.eigenvalues.size()));
    for (int i = 0; i < n; ++i) {
      p.coupled.push_back(a.eigenvalues[i]);
      p.decoupled.push_back(b.eigenvalues[i]);
      p.gaps.push_back(std::abs(a.eigenvalues[i] - b.eigenvalues[i]));
      p.max_gap = std::max(p.max_gap, p.gaps.back());
    }
    out.points.push_back(std::move(p));
    gaps.push_back(out.points.back().max_gap);
  }
  out.monotone = monotone_nonincreasing(gaps);
  return out;
}

std::vector<FactorizationLadder> verify_factorization(const CoupledSystem& sys,
                                                      std::span<const FactorizationCase> cases,
                                                      std::span<const int> level_caps) {
  check_coupled_system(sys);
  const FermionSector& sector = sys.hubbard.sector;
  const double beta = sys.hubbard.beta;
  for (const auto& c : cases) {
    if (c.a_e.rows() != sector.dim() || c.a_e.cols() != sector.dim()) {
      throw DomainError("verify_factorization: A_e does not act on the fermion sector");
    }
    if (static_cast<int>(c.f.size()) != sys.num_modes()) {
      throw DomainError("verify_factorization: f must have one entry per mode");
    }
  }
  // Electron side does not depend on the truncation.
  const EffectiveElectronState electrons(sys.hubbard, sys.discrete_overlap(-0.5));
  std::vector<Complex> electron_factor;
  for (const auto& c : cases) {
    std::vector<double> w = sys.discrete_weights(c.f);
    for (double& v : w) v *= -kPhaseSign;
    electron_factor.push_back(electrons.dressed_phase_expectation(c.a_e, w));
  }

  std::vector<FactorizationLadder> out(cases.size());
  for (int cap : level_caps) {
    const CoupledOperators ops = build_coupled_operators(sys, cap);
    const TruncatedBosonSpace space = boson_space(sys, cap);
    const GibbsState full = gibbs(HermitianOperator::from_symmetrized(ops.H_full), beta);
    const GibbsState bos = gibbs(HermitianOperator::from_symmetrized(ops.H_b), beta);
    for (std::size_t c = 0; c < cases.size(); ++c) {
      const CMatrix w = space.weyl(cases[c].f);
      FactorizationPoint p;
      p.level_cap = cap;
      p.lhs = expectation(full.density, kron(cases[c].a_e, w));
      p.rhs = electron_factor[c] * expectation(bos.density, w);
      p.gap = std::abs(p.lhs - p.rhs);
      out[c].points.push_back(p);
    }
  }
  for (auto& ladder : out) {
    std::vector<double> gaps;
    for (const auto& p : ladder.points) gaps.push_back(p.gap);
    ladder.monotone = monotone_nonincreasing(gaps);
  }
  return out;
}

FactorizationLadder verify_factorization(const CoupledSystem& sys, const CMatrix& a_e,
                                         std::span<const Complex> f, std::span<const int> level_caps) {
  const std::vector<FactorizationCase> cases{{a_e, std::vector<Complex>(f.begin(), f.end())}};
  return verify_factorization(sys, cases, level_caps).front();
}

double gibbs_invariance_defect(const CMatrix& h, const CMatrix& x, double beta, double t) {
  const HermitianOperator hh = HermitianOperator::from_symmetrized(h);
  const GibbsState g = gibbs(hh, beta);
  const CMatrix u = exp_hermitian(hh, Complex(0.0, t));
  return std::abs(expectation(g.density, u * x * u.adjoint()) - expectation(g.density, x));
}

}  // namespace beclab
