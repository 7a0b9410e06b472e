#include "beclab/linalg.hpp"
#include "beclab/errors.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <bit>
#include <cmath>

using namespace beclab;

TEST_CASE("fermion sector dimensions") {
  const FermionSector one(1, 2);
  CHECK(one.dim() == 1);
  CHECK(one.basis()[0] == 0b11u);
  CHECK(FermionSector(2, 2).dim() == 6);

  const FermionSector three(3, 3);
  std::vector<std::uint64_t> brute;
  for (std::uint64_t s = 0; s < 64; ++s) {
    if (std::popcount(s) == 3) brute.push_back(s);
  }
  REQUIRE(three.dim() == 20);
  for (std::size_t i = 0; i < brute.size(); ++i) CHECK(three.basis()[i] == brute[i]);
  CHECK(three.index_of(brute[7]).value() == 7);
  CHECK_FALSE(three.index_of(0b1u).has_value());

  CHECK_THROWS_AS(FermionSector(2, 5), DomainError);
}

TEST_CASE("number operators") {
  const FermionSector one(1, 2);
  CHECK(number_operator(one, 0, Spin::up).matrix()(0, 0) == Complex(1.0));

  const FermionSector two(2, 2);
  const double t0 = site_density(two, 0).matrix().trace().real();
  const double t1 = site_density(two, 1).matrix().trace().real();
  // 6 states, two electrons each: total occupation 12, split evenly between the sites.
  CHECK(t0 == doctest::Approx(6.0));
  CHECK(t1 == doctest::Approx(6.0));
}

TEST_CASE("canonical anticommutation on the full Fock space") {
  const int modes = 4;
  const auto dim = Eigen::Index(1) << modes;
  for (int i = 0; i < modes; ++i) {
    for (int j = 0; j < modes; ++j) {
      const CMatrix ci = fock_annihilation(modes, i), cj = fock_annihilation(modes, j);
      const CMatrix anti = ci * cj.adjoint() + cj.adjoint() * ci;
      const CMatrix expect = (i == j ? 1.0 : 0.0) * CMatrix::Identity(dim, dim);
      CHECK((anti - expect).norm() < 1e-14);
      CHECK((ci * cj + cj * ci).norm() < 1e-14);
    }
  }
}

TEST_CASE("hopping operator matches the Fock-space product restricted to the sector") {
  const FermionSector sec(2, 2);
  const int modes = sec.num_modes();
  const CMatrix full = fock_annihilation(modes, fermion_mode(0, Spin::up)).adjoint() *
                       fock_annihilation(modes, fermion_mode(1, Spin::up));
  const CMatrix sector_op = hopping_operator(sec, 0, Spin::up, 1, Spin::up);
  for (Eigen::Index a = 0; a < sec.dim(); ++a) {
    for (Eigen::Index b = 0; b < sec.dim(); ++b) {
      CHECK(std::abs(sector_op(a, b) - full(sec.basis()[a], sec.basis()[b])) < 1e-15);
    }
  }
}

TEST_CASE("truncated boson space") {
  const TruncatedBosonSpace one({{1.0, {}}}, 3);
  const CMatrix n = one.creation(0) * one.annihilation(0);
  CMatrix expect = CMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) expect(i, i) = i;
  CHECK((n - expect).norm() < 1e-14);

  const std::vector<Complex> zero{0.0};
  CHECK(one.field(zero).matrix().norm() == 0.0);

  // <0|W(f)|0> = exp(-|f|^2 / 4) for the Segal field.
  const TruncatedBosonSpace big({{1.0, {}}}, 30);
  const std::vector<Complex> f{std::polar(1.0, 0.4)};
  CHECK(std::abs(big.weyl(f)(0, 0) - std::exp(-0.25)) < 1e-6);

  const TruncatedBosonSpace two({{1.0, {}}, {2.0, {}}}, 2);
  CHECK(two.dim() == 9);
  CHECK(two.occupation(5, 0) == 2);
  CHECK(two.occupation(5, 1) == 1);
}

TEST_CASE("Gibbs states") {
  const int n = 5;
  const GibbsState flat = gibbs(HermitianOperator(CMatrix::Zero(n, n)), 2.0);
  CHECK(flat.partition_function == doctest::Approx(n));
  CHECK((flat.density - CMatrix::Identity(n, n) / double(n)).norm() < 1e-14);

  CMatrix two = CMatrix::Zero(2, 2);
  two(1, 1) = 2.0;
  CHECK(gibbs(HermitianOperator(two), 1.0).partition_function == doctest::Approx(1.0 + std::exp(-2.0)));

  const CMatrix h = oracle::random_hermitian(6, 7);
  const CMatrix series = oracle::exp_series(h, -1.3);
  const GibbsState g = gibbs(HermitianOperator(h), 1.3);
  CHECK((g.density - series / series.trace()).norm() < 1e-12);
  CHECK(std::log(series.trace().real()) == doctest::Approx(g.log_partition).epsilon(1e-12));
}

TEST_CASE("Hermitian contract") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(HermitianOperator{m}, ContractViolation);
  CHECK_THROWS_AS(HermitianOperator{CMatrix::Zero(2, 3)}, ContractViolation);
  const CMatrix h = oracle::random_hermitian(4, 3);
  const CMatrix u = exp_hermitian(HermitianOperator(h), Complex(0.0, 0.8));
  CHECK((u.adjoint() * u - CMatrix::Identity(4, 4)).norm() < 1e-13);
  CHECK((u - oracle::exp_series(h, Complex(0.0, 0.8))).norm() < 1e-12);
}
