#include "beclab/bec_states.hpp"
#include "beclab/bessel.hpp"
#include "beclab/errors.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace beclab;

namespace {

const Dispersion kDisp = quadratic_dispersion(1.0, 1.0);

BecContext condensed() { return make_bec_context(kDisp, 1.0, 2.0 * rho_crit(kDisp, 1.0)); }

// Zero mode cancels: two bumps of equal width and opposite amplitude.
TestFunction dipole() {
  return TestFunction(3, {{{0.0, 0.0, 1.0}, 0.3, {1.0, 0.0}, 0}, {{0.0, 0.0, -1.0}, 0.3, {-1.0, 0.0}, 0}});
}

// q1 by hand for a bump centred on the z axis: 2 pi int k^2 dk int du |f|^2 coth(k^2 / 2).
double q1_axis(double cz, double width, double amp) {
  return oracle::simpson(
      [&](double k) {
        k = std::max(k, 1e-9);  // k^2 coth(k^2 / 2) -> 2
        const double cth = 1.0 / std::tanh(0.5 * k * k);
        return oracle::simpson(
            [&](double u) {
              const double d2 = k * k + cz * cz - 2 * k * cz * u;
              return 2 * M_PI * k * k * amp * amp * std::exp(-d2 / (width * width)) * cth;
            },
            -1.0, 1.0, 1600);
      },
      0.0, std::abs(cz) + 12 * width, 3200);
}

}  // namespace

TEST_CASE("quadratic forms") {
  CHECK(q0(dipole(), 3.0) < 1e-30);
  const TestFunction one = TestFunction::gaussian({0.0}, 1.0, 1.0);
  const double c = condensate_amplitude(0.1, 1, 1);
  CHECK(q0(one, c) == doctest::Approx(1.25664).epsilon(1e-5));

  const TestFunction f = TestFunction::gaussian({0.0, 0.0, 1.2}, 0.35, 0.8);
  CHECK(q1(f, kDisp, 1.0) == doctest::Approx(q1_axis(1.2, 0.35, 0.8)).epsilon(1e-8));

  const TestFunction centred = TestFunction::gaussian({0.0, 0.0, 0.0}, 0.5, 1.0);
  CHECK(q1(centred, kDisp, 1.0) == doctest::Approx(q1_axis(0.0, 0.5, 1.0)).epsilon(1e-5));

  CHECK(std::abs(q2(f, kDisp, 1.0, 1e6) - f.norm_squared()) <= 1e-6);
  CHECK(q2(f, kDisp, 1.0, 1.0) == doctest::Approx(q1(f, kDisp, 1.0)).epsilon(1e-12));
}

TEST_CASE("BEC state values") {
  const BecContext ctx = condensed();
  const TestFunction zero = TestFunction::gaussian({0.0, 0.0, 0.0}, 0.5, 0.0);
  CHECK(psi_bec(zero, ctx) == 1.0);
  const TestFunction d = dipole();
  CHECK(psi_bec(d, ctx) == doctest::Approx(std::exp(-0.25 * q1(d, kDisp, 1.0))).epsilon(1e-14));

  const TestFunction f = TestFunction::gaussian({0.3, 0.0, 0.0}, 0.4, {0.6, 0.2});
  const double v = psi_bec(f, ctx);
  CHECK(v > 0.0);
  CHECK(v <= 1.0);
}

TEST_CASE("fiber states and fingerprints") {
  const BecContext ctx = condensed();
  const TestFunction f = TestFunction::gaussian({0.2, -0.1, 0.0}, 0.4, {0.7, 0.0});
  const double q1f = q1(f, kDisp, 1.0);

  const CondensatePhase origin = make_condensate_phase(ctx, 0.0, 1.3);
  CHECK(e_fingerprint(origin, f) == Complex(1.0, 0.0));
  CHECK(std::abs(psi_fiber(origin, f, kDisp, 1.0) - std::exp(-0.25 * q1f)) < 1e-15);

  const CondensatePhase a = make_condensate_phase(ctx, 0.8, 0.4);
  const CondensatePhase b = make_condensate_phase(ctx, 0.8, 0.4 + M_PI);
  CHECK(std::abs(e_fingerprint(b, f) - std::conj(e_fingerprint(a, f))) < 1e-14);

  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int i = 0; i < 20; ++i) {
    const CondensatePhase p = make_condensate_phase(ctx, u(rng), u(rng));
    CHECK(std::abs(std::abs(e_fingerprint(p, f)) - 1.0) < 1e-15);
    CHECK(std::abs(psi_fiber(p, f, q1f)) <= 1.0);
  }

  CHECK_THROWS_AS(make_condensate_phase(ctx, -1.0, 0.0), DomainError);
  CHECK_THROWS_AS(make_condensate_phase(0.5, 0.0, 0.0, 3), DomainError);
}

TEST_CASE("chi mixture reproduces the BEC state") {
  const BecContext ctx = condensed();
  const ChiRule rule = chi_rule();
  CHECK(std::abs(rule.total_mass() - 1.0) <= 1e-10);
  for (double w : {0.2, 0.5, 1.0}) {
    const TestFunction f = TestFunction::gaussian({0.1, 0.2, -0.3}, w, {0.5, -0.4});
    const DecompositionCheck dc = decomposition_check(f, ctx, rule);
    CHECK(dc.gap <= 1e-6);
  }
  CHECK(std::abs(mean_fiber_density(ctx, rule) - ctx.rho_bar) <= 1e-10);
}

TEST_CASE("Bessel identities") {
  // J0 against the standard library.
  for (double x : {0.0, 0.5, 3.0, 12.0, 19.9, 20.1, 35.0, 80.0}) {
    CHECK(std::abs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)) < 1e-12);
  }
  const IdentityGap lap = bessel_identity_check(1.0, 4.0);
  CHECK(lap.closed_form == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(lap.gap <= 1e-8);
  const IdentityGap ang = angular_identity_check(3.0, 4.0);
  CHECK(ang.closed_form == doctest::Approx(-0.177597).epsilon(1e-5));
  CHECK(ang.gap <= 1e-8);
  const IdentityGap flat = bessel_identity_check(2.0, 1e-12);
  CHECK(flat.quadrature == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("two-point function") {
  const BecContext ctx = condensed();
  const TestFunction f = TestFunction::gaussian({0.2, 0.0, 0.1}, 0.5, {0.9, 0.3});
  const TestFunction g = TestFunction::gaussian({-0.1, 0.3, 0.0}, 0.4, {0.2, -0.5});

  const TwoPoint ff = two_point(make_condensate_phase(ctx, 0.0, 0.7), f, f, kDisp, 1.0);
  CHECK(std::abs(ff.value.imag()) < 1e-14);
  CHECK(ff.value.real() >= 0.0);
  CHECK(ff.condensate_term == Complex(0.0, 0.0));

  const TwoPoint dd = two_point(make_condensate_phase(ctx, 1.4, 0.7), dipole(), dipole(), kDisp, 1.0);
  CHECK(std::abs(dd.condensate_term) < 1e-30);

  const TwoPoint fg = two_point(make_condensate_phase(ctx, 1.4, 0.7), f, g, kDisp, 1.0);
  CHECK(std::abs(fg.q1_gf - q1_form(f, g, kDisp, 1.0)) < 1e-14);
  const TwoPoint self = two_point(make_condensate_phase(ctx, 1.4, 0.7), f, f, kDisp, 1.0);
  CHECK(std::abs(self.q1_gf.real() - q1(f, kDisp, 1.0)) <= 1e-10);
  CHECK(self.condensate_term.real() >= 0.0);
  CHECK(self.thermal_term.real() >= 0.0);
}

TEST_CASE("fiber densities") {
  const BecContext ctx = condensed();
  CHECK(fiber_density(make_condensate_phase(ctx, 0.0, 0.0), ctx.rho_crit) == ctx.rho_crit);
  CHECK(fiber_density(make_condensate_phase(ctx, 1.0, 2.0), ctx.rho_crit) ==
        doctest::Approx(ctx.rho_0 + ctx.rho_crit).epsilon(1e-15));
}

TEST_CASE("gauge covariance and fingerprint recovery") {
  const BecContext ctx = condensed();
  const TestFunction f = TestFunction::gaussian({0.0, 0.0, 0.0}, 0.6, 0.8);
  const CondensatePhase p = make_condensate_phase(ctx, 1.2, 0.9);
  CHECK(gauge_shift_check(p, f, 0.0, kDisp, 1.0) == 0.0);
  CHECK(gauge_shift_check(p, f, M_PI, kDisp, 1.0) <= 1e-13);
  CHECK(gauge_shift_check(p, f, 2 * M_PI, kDisp, 1.0) <= 1e-13);

  const auto [f1, f2] = fingerprint_probes(ctx.amplitude, 3);
  CHECK(std::abs(std::sqrt(ctx.amplitude) * f1.zero_mode_scalar() - 1.0) < 1e-14);
  CHECK(std::abs(std::sqrt(ctx.amplitude) * f2.zero_mode_scalar() - Complex(0.0, 1.0)) < 1e-14);

  const CondensatePhase q = make_condensate_phase(ctx, 1.0, M_PI / 3);
  const FingerprintRecovery rec = fingerprint_recover(e_fingerprint(q, f1), e_fingerprint(q, f2));
  CHECK(std::abs(rec.r - 1.0) < 1e-9);
  CHECK(std::abs(rec.theta - M_PI / 3) < 1e-9);
  CHECK(rec.theta_determined);

  const CondensatePhase z = make_condensate_phase(ctx, 0.0, 2.0);
  const FingerprintRecovery r0 = fingerprint_recover(e_fingerprint(z, f1), e_fingerprint(z, f2));
  CHECK(r0.r == 0.0);
  CHECK_FALSE(r0.theta_determined);

  const CondensatePhase q2 = make_condensate_phase(ctx, 1.0, M_PI / 3 + 0.1);
  const bool differ = std::abs(e_fingerprint(q, f1) - e_fingerprint(q2, f1)) > 1e-6 ||
                      std::abs(e_fingerprint(q, f2) - e_fingerprint(q2, f2)) > 1e-6;
  CHECK(differ);

  const std::vector<std::pair<double, double>> atoms{{0.5, 0.0}, {1.0, 1.0}, {2.0, 2.5}, {1.0, 4.0}};
  std::vector<Complex> grid;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) grid.emplace_back(-1.25 + 0.5 * i, -1.25 + 0.5 * j);
  }
  const RankReport rank = fingerprint_rank(atoms, ctx.amplitude, grid);
  CHECK(rank.rank == 4);
}

TEST_CASE("stationarity") {
  const BecContext ctx = condensed();
  const TestFunction f = TestFunction::gaussian({0.0, 0.0, 0.0}, 0.3, 1.0);
  CHECK(stationarity_check(f, 0.0, ctx).gap == 0.0);
  CHECK(stationarity_check(dipole(), 1.7, ctx).gap <= 1e-10);
  const StationarityReport s = stationarity_check(f, 0.2, ctx);
  CHECK(s.zero_mode_drift < 0.0);
  CHECK(s.q1_drift <= 1e-8);
}

TEST_CASE("finite-volume limits") {
  const BecContext ctx = make_bec_context(kDisp, 1.0, 1.0);
  const TestFunction f = TestFunction::gaussian({1.5, 0.0, 0.0}, 0.3, {1.0, 0.5});
  const std::vector<double> Ls{10.0, 20.0, 40.0};
  const LimitLadder lad = characteristic_limits(f, ctx, Ls);
  CHECK(lad.gap1_decreasing);
  CHECK(lad.gap2_decreasing);
  CHECK(lad.points.back().gap1 <= 1e-2 * lad.q0_limit);
  CHECK(lad.points.back().gap2 <= 1e-2 * lad.I2_limit);

  const TestFunction zero = TestFunction::gaussian({0.0, 0.0, 0.0}, 0.5, 0.0);
  const CombinedLadder triv = combined_limit(1.0, zero, ctx, Ls);
  for (const auto& p : triv.points) {
    CHECK(p.finite == Complex(1.0, 0.0));
    CHECK(p.limit == Complex(1.0, 0.0));
  }

  const BecContext sub = make_bec_context(kDisp, 1.0, 0.5 * rho_crit(kDisp, 1.0));
  const LimitLadder normal = characteristic_limits(f, sub, Ls);
  CHECK(normal.regime == "normal");
  CHECK(normal.q0_limit == 0.0);
  CHECK(normal.I2_limit == doctest::Approx(q2(f, kDisp, 1.0, sub.phase.normal_fugacity)));
  CHECK(normal.gap2_decreasing);
}
