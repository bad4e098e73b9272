#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dlog {

struct RootResult {
  double root;
  double bracket_width;
  int iterations;
};

/// Plain bisection on [a, b]; f(a) and f(b) must have opposite signs
/// (a zero endpoint counts as a root). Stops when the bracket is
/// narrower than xtol.
template <class F>
RootResult bisect(F&& f, double a, double b, double xtol, int max_iter = 200) {
  if (!(a < b)) throw std::invalid_argument("bisect: need a < b");
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return {a, 0.0, 0};
  if (fb == 0.0) return {b, 0.0, 0};
  if (std::signbit(fa) == std::signbit(fb)) {
    throw std::invalid_argument("bisect: interval does not bracket a sign change");
  }
  int it = 0;
  while (b - a > xtol && it < max_iter) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;  // bracket at roundoff resolution
    const double fm = f(m);
    ++it;
    if (fm == 0.0) return {m, 0.0, it};
    if (std::signbit(fm) == std::signbit(fa)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return {0.5 * (a + b), b - a, it};
}

/// Brent's method: inverse-quadratic interpolation safeguarded by
/// bisection. Same bracketing contract as bisect(); converges to a
/// bracket narrower than xtol.
template <class F>
RootResult brent(F&& f, double a, double b, double xtol, int max_iter = 200) {
  if (!(a < b)) throw std::invalid_argument("brent: need a < b");
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return {a, 0.0, 0};
  if (fb == 0.0) return {b, 0.0, 0};
  if (std::signbit(fa) == std::signbit(fb)) {
    throw std::invalid_argument("brent: interval does not bracket a sign change");
  }
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 1; it <= max_iter; ++it) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 0.5 * xtol + 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b);
    const double xm = 0.5 * (c - b);
    if (fb == 0.0) return {b, 0.0, it};
    if (std::abs(xm) <= tol1) {
      return {b, 2.0 * std::abs(xm), it};
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // attempt interpolation
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double rr = fb / fc;
        p = s * (2.0 * xm * qq * (qq - rr) - (b - a) * (rr - 1.0));
        q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : std::copysign(tol1, xm);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  return {b, std::abs(c - b), max_iter};
}

}  // namespace dlog
