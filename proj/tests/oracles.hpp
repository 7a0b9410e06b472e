#pragma once

// Reference computations for the tests. Deliberately naive: plain loops,
// composite Simpson and truncated series, no calls into the library's
// quadrature or spectral code.

#include "beclab/linalg.hpp"

#include <cmath>
#include <functional>

namespace oracle {

using beclab::CMatrix;
using beclab::Complex;

/// exp(s A) by Taylor series with scaling and squaring.
inline CMatrix exp_series(const CMatrix& a, Complex s, int terms = 60) {
  const double norm = (s * a).cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.5) ++squarings;
  const CMatrix x = (s / std::pow(2.0, squarings)) * a;
  CMatrix term = CMatrix::Identity(a.rows(), a.cols()), sum = term;
  for (int k = 1; k <= terms; ++k) {
    term = (term * x) / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// Composite Simpson with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Gibbs expectation Tr[A e^{-beta H}] / Tr[e^{-beta H}] through the series exponential.
inline Complex gibbs_expectation(const CMatrix& h, const CMatrix& a, double beta) {
  const CMatrix rho = exp_series(h, Complex(-beta, 0.0));
  return (a * rho).trace() / rho.trace();
}

inline CMatrix random_hermitian(int n, unsigned seed) {
  std::srand(seed);
  CMatrix m = CMatrix::Random(n, n);
  return 0.5 * (m + m.adjoint());
}

}  // namespace oracle
