#pragma once

// J0 and the two integral identities behind the fiber decomposition of the
// condensate: the Laplace transform of J0(sqrt(b r)) and the angular mean of
// exp(i (p cos t + q sin t)).

namespace beclab {

/// Bessel J0: power series in long double for x <= 20, Hankel asymptotics above.
double bessel_j0(double x);

struct IdentityGap {
  double quadrature = 0.0;
  double closed_form = 0.0;
  double gap = 0.0;
};

/// int_0^inf e^{-a r} J0(sqrt(b r)) dr against e^{-b / (4a)} / a.
IdentityGap bessel_identity_check(double a, double b);

/// (1 / 2 pi) int_0^{2 pi} e^{i (p cos t + q sin t)} dt against J0(sqrt(p^2 + q^2)).
/// The imaginary part of the mean is folded into the gap.
IdentityGap angular_identity_check(double p, double q);

}  // namespace beclab
