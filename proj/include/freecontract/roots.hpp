#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "freecontract/error.hpp"

namespace fc::roots {

// Brent's method on a sign-changing bracket [a, b]. The bracket is kept at
// every step, so convergence is unconditional; interpolation steps give the
// superlinear polish. Returns the point with the smaller |f| once the bracket
// is below `xtol` (or cannot shrink further in floating point).
template <class F>
double brent(F&& f, double a, double b, double fa, double fb, double xtol = 0.0,
             int max_iter = 300) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw DomainError("brent: bracket does not change sign");
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * eps * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  throw ConvergenceError("brent: iteration cap reached");
}

template <class F>
double brent(F&& f, double a, double b, double xtol = 0.0, int max_iter = 300) {
  const double fa = f(a);
  const double fb = f(b);
  return brent(f, a, b, fa, fb, xtol, max_iter);
}

// Plain bisection to floating-point resolution; used where only the sign of
// f is trustworthy (next to poles).
template <class F>
double bisect(F&& f, double a, double b, int max_iter = 400) {
  double fa = f(a);
  for (int iter = 0; iter < max_iter; ++iter) {
    const double mid = 0.5 * (a + b);
    if (mid <= std::min(a, b) || mid >= std::max(a, b)) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace fc::roots
