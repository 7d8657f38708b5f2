#pragma once

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace samp::detail {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // sum of panel error estimates
  double l1 = 0.0;     // integral of |f|
};

// Adaptive bisection over 31-point Gauss-Kronrod panels.  Boost reports the
// panel error on the reference interval [-1, 1], so it is rescaled here by
// the half width before it is compared with the panel's L1 norm.
template <class F>
QuadratureResult adaptive_gauss_kronrod(const F& f, double a, double b, double rel_tol,
                                        int max_depth) {
  double err = 0.0;
  double l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err, &l1);
  err *= 0.5 * std::abs(b - a);
  if (max_depth <= 0 || !(err > rel_tol * l1)) return {value, err, l1};
  const double mid = 0.5 * (a + b);
  const auto left = adaptive_gauss_kronrod(f, a, mid, rel_tol, max_depth - 1);
  const auto right = adaptive_gauss_kronrod(f, mid, b, rel_tol, max_depth - 1);
  return {left.value + right.value, left.error + right.error, left.l1 + right.l1};
}

}  // namespace samp::detail
