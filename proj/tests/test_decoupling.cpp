#include "beclab/decoupling.hpp"
#include "beclab/errors.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>

using namespace beclab;

namespace {

CoupledSystem fixture(double alpha, double t = 1.0, int sites = 2, int electrons = 2, int modes = 2) {
  const Dispersion disp = quadratic_dispersion(1.0, 1.0);
  HubbardSystem h(FermionSector(sites, electrons), chain_hopping(sites, t), 2.0, alpha, 1.0);
  CoupledSystem sys{h, CouplingFamily::chain(sites, 3, 2.0), disp,
                    select_lattice_modes(2 * M_PI, 3, 0.5, modes), 0.5};
  check_coupled_system(sys);
  return sys;
}

}  // namespace

TEST_CASE("lattice mode selection") {
  const auto m = select_lattice_modes(2 * M_PI, 3, 0.5, 3);
  REQUIRE(m.size() == 3);
  CHECK(m[0].k[0] == 1.0);
  CHECK(m[1].k[1] == 1.0);
  CHECK(m[2].k[2] == 1.0);
  CHECK(m[0].weight == doctest::Approx(1.0));
  // kappa above the first shell skips it.
  const auto far = select_lattice_modes(2 * M_PI, 3, 1.2, 1);
  CHECK(std::hypot(far[0].k[0], far[0].k[1], far[0].k[2]) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("coupled operators at zero coupling") {
  const CoupledSystem sys = fixture(0.0);
  const CoupledOperators ops = build_coupled_operators(sys, 4);
  const auto n = ops.V.rows();
  CHECK((ops.V - CMatrix::Identity(n, n)).norm() == 0.0);
  CHECK((ops.H_full - ops.H_fr).norm() == 0.0);

  const IdentityLadder id = verify_dressing_identity(sys, std::vector<int>{4, 6});
  for (const auto& p : id.points) CHECK(p.residual == 0.0);

  const SpectralLadder sp = verify_spectral_equivalence(sys, std::vector<int>{4}, 5);
  CHECK(sp.points[0].max_gap <= 1e-12);
  CHECK(sp.points[0].coupled.size() == sp.points[0].decoupled.size());

  const CMatrix a = oracle::random_hermitian(6, 2);
  const std::vector<Complex> f{{0.3, -0.1}, {0.2, 0.4}};
  const FactorizationLadder fl = verify_factorization(sys, a, f, std::vector<int>{6, 9});
  for (const auto& p : fl.points) CHECK(p.gap <= 1e-10);
}

TEST_CASE("coupled operators on the two-site fixture") {
  const CoupledSystem sys = fixture(0.2);
  const CoupledOperators ops = build_coupled_operators(sys, 6);
  CHECK(hermiticity_defect(ops.S) <= 1e-12);
  CHECK(unitarity_defect(ops.V) <= 1e-10);

  // Conjugation keeps the spectrum.
  const CMatrix x = oracle::random_hermitian(static_cast<int>(ops.V.rows()), 9);
  const Eigen::SelfAdjointEigenSolver<CMatrix> e0(x);
  const CMatrix y = ops.V * x * ops.V.adjoint();
  const Eigen::SelfAdjointEigenSolver<CMatrix> e1(0.5 * (y + y.adjoint()));
  CHECK((e0.eigenvalues() - e1.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-10);

  CHECK(gibbs_invariance_defect(ops.H_full, x, 1.0, 0.9) <= 1e-10);

  const FactorizationLadder unit = verify_factorization(sys, CMatrix::Identity(6, 6),
                                                        std::vector<Complex>{0.0, 0.0}, std::vector<int>{6});
  CHECK(std::abs(unit.points[0].lhs - 1.0) < 1e-12);
  CHECK(std::abs(unit.points[0].rhs - 1.0) < 1e-12);
}

TEST_CASE("dressing identity ladder") {
  const std::vector<int> caps{6, 9, 12};
  const IdentityLadder id = verify_dressing_identity(fixture(0.2), caps);
  CHECK(id.monotone);
  CHECK(id.points.back().residual <= 1e-3);

  const IdentityLadder strong = verify_dressing_identity(fixture(0.4), caps);
  CHECK(strong.monotone);
  for (std::size_t i = 0; i < caps.size(); ++i) CHECK(strong.points[i].residual > id.points[i].residual);
}

TEST_CASE("displaced oscillator levels") {
  // One site, two electrons, one mode: H = U + h a^dag a + alpha n phi(g) with n = 2,
  // whose levels are U - 2 alpha^2 |g|^2 / h + m h.
  const double alpha = 0.3;
  const CoupledSystem sys = fixture(alpha, 0.0, 1, 2, 1);
  const double h = sys.dispersion.omega(1.0);
  const Complex g = sys.family.value(0, sys.modes[0].k, sys.kappa) * std::sqrt(sys.modes[0].weight);
  const SpectralLadder sp = verify_spectral_equivalence(sys, std::vector<int>{20}, 5);
  for (int m = 0; m < 5; ++m) {
    const double exact = 2.0 - 2.0 * alpha * alpha * std::norm(g) / h + m * h;
    CHECK(std::abs(sp.points[0].coupled[m] - exact) <= 1e-4);
    CHECK(std::abs(sp.points[0].decoupled[m] - exact) <= 1e-4);
  }
}

TEST_CASE("factorization with diagonal hopping") {
  const CoupledSystem sys = fixture(0.2, 0.0);
  const CMatrix a = oracle::random_hermitian(6, 4);
  const std::vector<Complex> f{{0.4, 0.1}, {-0.2, 0.3}};
  const FactorizationLadder fl = verify_factorization(sys, a, f, std::vector<int>{6, 9, 12});
  CHECK(fl.monotone);
  CHECK(fl.points.back().gap <= 1e-8);
}

TEST_CASE("coupled system guards") {
  CoupledSystem sys = fixture(0.2);
  sys.dimension_cap = 100;
  CHECK_THROWS_AS(sys.total_dimension(12), DimensionCapExceeded);
  // Values already below the floor count as converged.
  CHECK(monotone_nonincreasing(std::vector<double>{1e-3, 5e-13, 8e-13}));
  CHECK_FALSE(monotone_nonincreasing(std::vector<double>{3.0, 2.0, 2.1}));

  sys = fixture(0.2);
  sys.kappa = 0.0;
  CHECK_THROWS_AS(check_coupled_system(sys), DomainError);
}
