#include "beclab/bessel.hpp"

#include "beclab/errors.hpp"
#include "beclab/quadrature.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace beclab {

double bessel_j0(double x) {
  x = std::abs(x);
  if (x <= 20.0) {
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 200; ++k) {
      term *= -q / (static_cast<long double>(k) * k);
      sum += term;
      if (std::abs(term) < 1e-22L) break;
    }
    return static_cast<double>(sum);
  }
  // Hankel expansion: t_k = |a_k(0)| / x^k, P = t0 - t2 + t4 - ..., Q = -t1 + t3 - ...
  double p = 1.0, q = 0.0, t = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double next = t * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (next > t) break;
    t = next;
    const double sign = (k / 2) % 2 == 0 ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * t;
    } else {
      q -= sign * t;
    }
    if (t < 1e-18) break;
  }
  const double chi = x - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

IdentityGap bessel_identity_check(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("bessel identity: a and b must be positive");
  IdentityGap out;
  out.closed_form = std::exp(-b / (4.0 * a)) / a;
  const double end = 40.0 / a;
  // Panels end near the zeros of J0(sqrt(b r)) so each one sees a single lobe.
  double acc = 0.0, lo = 0.0;
  auto f = [&](double r) { return std::exp(-a * r) * bessel_j0(std::sqrt(b * r)); };
  for (int n = 1; lo < end && n <= 100000; ++n) {
    const double hi = std::min(end, std::pow((n - 0.25) * std::numbers::pi, 2) / b);
    // Roundoff in J0 keeps a pure relative target out of reach on late panels.
    acc += quad::integrate(f, lo, hi, 1e-12, 12).value;
    lo = hi;
  }
  out.quadrature = acc;
  out.gap = std::abs(out.quadrature - out.closed_form);
  return out;
}

IdentityGap angular_identity_check(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw DomainError("angular identity: p and q must be positive");
  IdentityGap out;
  const double rho = std::hypot(p, q);
  out.closed_form = bessel_j0(rho);
  const int n = 2 * static_cast<int>(std::ceil(rho)) + 64;
  const quad::Rule rule = quad::periodic_trapezoid(n);
  std::complex<double> mean{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    mean += rule.weights[i] * std::exp(std::complex<double>(0.0, p * std::cos(t) + q * std::sin(t)));
  }
  mean /= 2.0 * std::numbers::pi;
  out.quadrature = mean.real();
  out.gap = std::abs(mean - std::complex<double>(out.closed_form, 0.0));
  return out;
}

}  // namespace beclab
