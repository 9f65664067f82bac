// Adaptive Gauss-Kronrod driver shared by the quadrature oracles.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "noma/analytic.hpp"

namespace noma::detail {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// One 61-point Kronrod panel. Boost 1.74 reports the panel error in the
// [-1, 1] variable, so it is rescaled here.
template <class F>
inline double panel(F& f, double a, double b, double& err, double& l1) {
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 0, 0.0, &err, &l1);
  err *= (b - a) / 2;
  return v;
}

template <class F>
inline double bisect(F& f, double a, double b, double v, double e, double l, double target, unsigned depth, double& err,
              double& l1) {
  if (depth == 0 || e <= target) {
    err += e;
    l1 += l;
    return v;
  }
  const double mid = (a + b) / 2;
  double el, ll, er, lr;
  const double vl = panel(f, a, mid, el, ll);
  const double vr = panel(f, mid, b, er, lr);
  return bisect(f, a, mid, vl, el, ll, target / 2, depth - 1, err, l1) +
         bisect(f, mid, b, vr, er, lr, target / 2, depth - 1, err, l1);
}

template <class F>
inline double integrate(F&& f, double a, double b, const QuadratureOptions& o, const char* what) {
  if (!(b > a)) return 0;
  double e0, l0;
  const double v0 = panel(f, a, b, e0, l0);
  double err = 0;
  double l1 = 0;
  const double target = std::max(o.rel_tol * l0, o.abs_tol);
  const double v = bisect(f, a, b, v0, e0, l0, target, o.max_depth, err, l1);
  if (!std::isfinite(v) || err > std::max(10 * o.rel_tol * l1, o.abs_tol)) {
    throw QuadratureError(std::string(what) + ": adaptive quadrature did not reach the tolerance (value " +
                              fmt(v) + ", error " + fmt(err) + ", L1 " + fmt(l1) + ")",
                          err);
  }
  return v;
}

}  // namespace noma::detail
