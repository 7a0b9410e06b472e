#include "beclab/hubbard.hpp"

#include "beclab/errors.hpp"

#include <limits>
#include <cmath>
#include <numbers>

namespace beclab {

namespace {

// Integral of e^{i k.s} over the unit sphere S^{d-1} at |k| = k, |s| = s.
double angular_plane_wave(int dim, double ks) {
  if (ks == 0.0) return quad::sphere_area(dim);
  switch (dim) {
    case 1:
      return 2.0 * std::cos(ks);
    case 2:
      return 2.0 * std::numbers::pi * std::cyl_bessel_j(0.0, ks);
    case 3:
      return 4.0 * std::numbers::pi * std::sin(ks) / ks;
    default: {
      const double nu = 0.5 * dim - 1.0;
      return quad::sphere_area(dim) * std::tgamma(0.5 * dim) * std::pow(2.0 / ks, nu) *
             std::cyl_bessel_j(nu, ks);
    }
  }
}

// Local exponent p of r(k) ~ C k^p at k -> 0 when r(0) = 0.
double massless_exponent(const Dispersion& disp) {
  const double k1 = 1e-4, k2 = 2e-4;
  return std::log(disp.omega(k2) / disp.omega(k1)) / std::log(k2 / k1);
}

void check_infrared(const Dispersion& disp, double weight_power, double kappa, const char* what) {
  if (kappa > 0.0 || weight_power >= 0.0 || disp.omega0() > 0.0) return;
  const double p = massless_exponent(disp);
  if (!(disp.dim() + weight_power * p > 0.0)) {
    throw InfraredDivergence(std::string(what) +
                             ": massless dispersion without infrared cutoff gives a divergent "
                             "integral; set kappa > 0");
  }
}

}  // namespace

CouplingFamily::CouplingFamily(std::vector<std::array<double, 3>> positions, int dim,
                               double uv_width)
    : positions_(std::move(positions)), dim_(dim), uv_width_(uv_width) {
  if (positions_.empty()) throw DomainError("coupling family: need at least one site");
  if (dim < 1 || dim > 3) throw DomainError("coupling family: dimension must be 1, 2 or 3");
  if (!(uv_width > 0.0)) throw DomainError("coupling family: UV width must be positive");
}

CouplingFamily CouplingFamily::chain(int num_sites, int dim, double uv_width) {
  std::vector<std::array<double, 3>> pos;
  for (int x = 0; x < num_sites; ++x) pos.push_back({static_cast<double>(x), 0.0, 0.0});
  return CouplingFamily(std::move(pos), dim, uv_width);
}

double CouplingFamily::separation(int x, int y) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += std::pow(positions_.at(x)[i] - positions_.at(y)[i], 2);
  return std::sqrt(s);
}

double CouplingFamily::envelope(double k) const {
  return std::exp(-k * k / (2.0 * uv_width_ * uv_width_));
}

Complex CouplingFamily::value(int site, const std::array<double, 3>& k, double kappa) const {
  const double kn = norm(k, dim_);
  if (kn < kappa) return {};
  double phase = 0.0;
  for (int i = 0; i < dim_; ++i) phase += k[i] * positions_.at(site)[i];
  return std::polar(envelope(kn), -phase);
}

double CouplingFamily::uv_radius() const { return uv_width_ * std::sqrt(std::log(1e18)); }

Complex coupling_overlap(const CouplingFamily& family, const Dispersion& disp, double m, int x, int y,
                         double kappa) {
  if (!(kappa >= 0.0)) throw DomainError("coupling_overlap: kappa must be nonnegative");
  if (x < 0 || y < 0 || x >= family.num_sites() || y >= family.num_sites()) {
    throw DomainError("coupling_overlap: site index out of range");
  }
  if (family.dim() != disp.dim()) throw DomainError("coupling_overlap: dimension mismatch");
  check_infrared(disp, 2.0 * m, kappa, "coupling_overlap");
  const int d = family.dim();
  const double s = family.separation(x, y);
  const double k_hi = family.uv_radius();
  if (kappa >= k_hi) return {};
  auto radial = [&](double k) {
    const double env = family.envelope(k);
    return std::pow(k, d - 1) * std::pow(disp.omega(k), 2.0 * m) * env * env *
           angular_plane_wave(d, k * s);
  };
  double value = 0.0;
  if (kappa == 0.0 && disp.omega0() == 0.0 && m < 0.0) {
    const double split = std::min(1.0, k_hi);
    value = quad::integrate_singular(radial, 0.0, split, 1e-13).value +
            quad::integrate(radial, split, k_hi, 1e-13).value;
  } else {
    value = quad::integrate(radial, kappa, k_hi, 1e-13).value;
  }
  if (!std::isfinite(value)) throw InfraredDivergence("coupling_overlap: integral is not finite");
  return {value, 0.0};
}

OverlapMatrix overlap_matrix(const CouplingFamily& family, const Dispersion& disp, double m,
                             double kappa) {
  const int n = family.num_sites();
  OverlapMatrix out{m, kappa, CMatrix::Zero(n, n)};
  for (int x = 0; x < n; ++x) {
    for (int y = x; y < n; ++y) {
      const Complex g = coupling_overlap(family, disp, m, x, y, kappa);
      out.entries(x, y) = g;
      out.entries(y, x) = std::conj(g);
    }
  }
  return out;
}

ValidationReport validate_coupling(const CouplingFamily& family, const Dispersion& disp,
                                   double kappa) {
  ValidationReport report;
  auto finite_overlap = [&](double m, const std::string& name, const std::string& detail) {
    ConditionCheck c{name, false, std::numeric_limits<double>::infinity(), detail};
    try {
      double worst = 0.0;
      for (int x = 0; x < family.num_sites(); ++x) {
        worst = std::max(worst, coupling_overlap(family, disp, m, x, x, kappa).real());
      }
      c.witness = worst;
      c.passed = std::isfinite(worst);
    } catch (const InfraredDivergence&) {
    }
    report.checks.push_back(c);
  };
  finite_overlap(-0.5, "lambda_in_dom_omega_minus_half", "max_x ||omega^{-1/2} lambda_x||^2");
  if (kappa > 0.0) {
    finite_overlap(-1.0, "lambda_in_dom_omega_minus_one", "max_x ||omega^{-1} lambda_x||^2");
  }
  // ||lambda^kappa - lambda||^2 = int_{|k|<kappa} e^{-k^2/Lambda^2} dk -> 0 as kappa -> 0.
  const int d = family.dim();
  const double defect =
      kappa == 0.0 ? 0.0
                   : quad::sphere_area(d) *
                         quad::integrate(
                             [&](double k) {
                               const double e = family.envelope(k);
                               return std::pow(k, d - 1) * e * e;
                             },
                             0.0, kappa)
                             .value;
  report.checks.push_back({"cutoff_strong_convergence", std::isfinite(defect), defect,
                           "||lambda^kappa - lambda||^2 (vanishes as kappa -> 0)"});
  return report;
}

HubbardSystem::HubbardSystem(FermionSector sector_, CMatrix hopping_, double repulsion_,
                             double coupling_, double beta_)
    : sector(std::move(sector_)),
      hopping(std::move(hopping_)),
      repulsion(repulsion_),
      coupling(coupling_),
      beta(beta_) {
  const int n = sector.num_sites();
  if (hopping.rows() != n || hopping.cols() != n) {
    throw DomainError("hubbard: hopping matrix must be |Lambda| x |Lambda|");
  }
  if (hermiticity_defect(hopping) > 1e-12) {
    throw ContractViolation("hubbard: hopping matrix is not Hermitian");
  }
  if (!(repulsion > 0.0)) throw DomainError("hubbard: U must be positive");
  if (!(beta > 0.0)) throw DomainError("hubbard: beta must be positive");
  if (!std::isfinite(coupling)) throw DomainError("hubbard: alpha must be finite");
}

CMatrix chain_hopping(int num_sites, double t, bool periodic) {
  if (num_sites < 1) throw DomainError("chain_hopping: need at least one site");
  CMatrix h = CMatrix::Zero(num_sites, num_sites);
  for (int x = 0; x + 1 < num_sites; ++x) h(x, x + 1) = h(x + 1, x) = -t;
  if (periodic && num_sites > 2) h(0, num_sites - 1) = h(num_sites - 1, 0) = -t;
  return h;
}

HermitianOperator build_hubbard_hamiltonian(const HubbardSystem& sys) {
  const FermionSector& s = sys.sector;
  const int n = s.num_sites();
  CMatrix h = CMatrix::Zero(s.dim(), s.dim());
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (sys.hopping(x, y) == Complex{}) continue;
      for (Spin spin : {Spin::up, Spin::down}) {
        h += sys.hopping(x, y) * hopping_operator(s, x, spin, y, spin);
      }
    }
  }
  const auto basis = s.basis();
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    int doubles = 0;
    for (int x = 0; x < n; ++x) {
      const bool up = (basis[i] >> fermion_mode(x, Spin::up)) & 1U;
      const bool down = (basis[i] >> fermion_mode(x, Spin::down)) & 1U;
      doubles += (up && down) ? 1 : 0;
    }
    h(i, i) += sys.repulsion * doubles;
  }
  return HermitianOperator::from_symmetrized(h);
}

HermitianOperator density_density(const FermionSector& sector, const CMatrix& g) {
  const int n = sector.num_sites();
  if (g.rows() != n || g.cols() != n) throw DomainError("density_density: G has wrong shape");
  CMatrix r = CMatrix::Zero(sector.dim(), sector.dim());
  const auto basis = sector.basis();
  std::vector<double> occ(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < sector.dim(); ++i) {
    for (int x = 0; x < n; ++x) {
      occ[x] = static_cast<double>(((basis[i] >> fermion_mode(x, Spin::up)) & 1U) +
                                   ((basis[i] >> fermion_mode(x, Spin::down)) & 1U));
    }
    double v = 0.0;
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) v += g(x, y).real() * occ[x] * occ[y];
    }
    r(i, i) = v;
  }
  return HermitianOperator::from_symmetrized(r);
}

HermitianOperator build_effective_hamiltonian(const HubbardSystem& sys, const CMatrix& g_half) {
  if (hermiticity_defect(g_half) > 1e-10) {
    throw ContractViolation("effective hamiltonian: overlap matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g_half, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, g_half.cwiseAbs().maxCoeff());
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw ContractViolation("effective hamiltonian: overlap matrix is not positive semidefinite");
  }
  const HermitianOperator he = build_hubbard_hamiltonian(sys);
  if (sys.coupling == 0.0) return he;
  return he - (0.5 * sys.coupling * sys.coupling) * density_density(sys.sector, g_half);
}

HermitianOperator build_effective_hamiltonian(const HubbardSystem& sys, const OverlapMatrix& overlaps) {
  if (overlaps.power != -0.5) {
    throw DomainError("effective hamiltonian: needs the m = -1/2 overlap matrix");
  }
  return build_effective_hamiltonian(sys, overlaps.entries);
}

EffectiveElectronState::EffectiveElectronState(const HubbardSystem& sys, const CMatrix& g_half)
    : sys_(sys),
      hamiltonian_(build_effective_hamiltonian(sys, g_half)),
      gibbs_(gibbs(hamiltonian_, sys.beta)) {}

EffectiveElectronState::EffectiveElectronState(const HubbardSystem& sys, const OverlapMatrix& overlaps)
    : sys_(sys),
      hamiltonian_(build_effective_hamiltonian(sys, overlaps)),
      gibbs_(gibbs(hamiltonian_, sys.beta)) {}

Complex EffectiveElectronState::expectation(const CMatrix& a) const {
  if (a.rows() != gibbs_.density.rows() || a.cols() != gibbs_.density.cols()) {
    throw DomainError("electron expectation: operator dimension does not match the sector");
  }
  return beclab::expectation(gibbs_.density, a);
}

CMatrix EffectiveElectronState::dressing_phase(std::span<const double> weights) const {
  const FermionSector& s = sys_.sector;
  if (static_cast<int>(weights.size()) != s.num_sites()) {
    throw DomainError("dressing phase: need one weight per site");
  }
  CMatrix p = CMatrix::Zero(s.dim(), s.dim());
  const auto basis = s.basis();
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    double ntilde = 0.0;
    for (int x = 0; x < s.num_sites(); ++x) {
      const int nx = static_cast<int>(((basis[i] >> fermion_mode(x, Spin::up)) & 1U) +
                                      ((basis[i] >> fermion_mode(x, Spin::down)) & 1U));
      ntilde += weights[x] * nx;
    }
    p(i, i) = std::polar(1.0, -sys_.coupling * ntilde);
  }
  return p;
}

Complex EffectiveElectronState::dressed_phase_expectation(const CMatrix& a,
                                                          std::span<const double> weights) const {
  return expectation(dressing_phase(weights) * a);
}

std::vector<double> dressing_weights(const CouplingFamily& family, const Dispersion& disp,
                                     const TestFunction& f, double kappa,
                                     const quad::SphericalOptions& opts) {
  if (f.dim() != family.dim() || disp.dim() != family.dim()) {
    throw DomainError("dressing_weights: dimension mismatch");
  }
  check_infrared(disp, -1.0, kappa, "dressing_weights");
  const double k_hi = std::min(family.uv_radius(), f.support_radius());
  std::vector<double> w(static_cast<std::size_t>(family.num_sites()), 0.0);
  if (f.is_zero() || kappa >= k_hi) return w;
  for (int x = 0; x < family.num_sites(); ++x) {
    auto integrand = [&](const std::array<double, 3>& k) {
      const Complex lam = family.value(x, k, 0.0);
      Complex acc{};
      for (int c = 0; c < f.internal_components(); ++c) acc += std::conj(f.value(k, c)) * lam;
      return acc / disp.omega(norm(k, f.dim()));
    };
    w[x] = quad::spherical_integral(f.dim(), kappa, k_hi, integrand, opts).real();
  }
  return w;
}

double infrared_boson_number(const EffectiveElectronState& state, const OverlapMatrix& minus_one,
                             int internal_components) {
  if (minus_one.power != -1.0) throw DomainError("infrared_boson_number: needs m = -1 overlaps");
  const double alpha = state.system().coupling;
  const HermitianOperator r = density_density(state.system().sector, minus_one.entries);
  return internal_components * alpha * alpha * state.expectation(r.matrix()).real();
}

}  // namespace beclab
