// Floating-point shim so the special functions and closed-form series can be
// instantiated for both double and the 113-bit binary128 type.
//
// The closed-form outage series are alternating sums whose largest terms can
// exceed the result by twenty or more decades at low SNR; they are evaluated
// in binary128 and rounded to double once at the end.
#pragma once

#include <cmath>
#include <limits>

extern "C" {
#include <quadmath.h>
}

namespace noma {

using quad = __float128;

namespace num {

inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double expm1(double x) { return std::expm1(x); }
inline double log1p(double x) { return std::log1p(x); }
inline double pow(double x, double y) { return std::pow(x, y); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double abs(double x) { return std::fabs(x); }
inline double floor(double x) { return std::floor(x); }
inline bool isfinite(double x) { return std::isfinite(x); }
inline bool isnan(double x) { return std::isnan(x); }

inline quad exp(quad x) { return expq(x); }
inline quad log(quad x) { return logq(x); }
inline quad expm1(quad x) { return expm1q(x); }
inline quad log1p(quad x) { return log1pq(x); }
inline quad pow(quad x, quad y) { return powq(x, y); }
inline quad sqrt(quad x) { return sqrtq(x); }
inline quad abs(quad x) { return fabsq(x); }
inline quad floor(quad x) { return floorq(x); }
inline bool isfinite(quad x) { return finiteq(x) != 0; }
inline bool isnan(quad x) { return isnanq(x) != 0; }

// Integer power by repeated squaring; exact for small exponents and avoids
// pow() for the binomial/Taylor prefactors.
template <class Real>
Real ipow(Real base, int exponent) {
  if (exponent < 0) return Real(1) / ipow(base, -exponent);
  Real result = 1;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

template <class Real>
struct limits;

template <>
struct limits<double> {
  static constexpr double epsilon() { return std::numeric_limits<double>::epsilon(); }
  static constexpr double min_normal() { return std::numeric_limits<double>::min(); }
  static constexpr double max() { return std::numeric_limits<double>::max(); }
  static constexpr double infinity() { return std::numeric_limits<double>::infinity(); }
  static constexpr double euler_gamma() { return 0.57721566490153286061; }
};

template <>
struct limits<quad> {
  static constexpr quad epsilon() { return FLT128_EPSILON; }
  static constexpr quad min_normal() { return FLT128_MIN; }
  static constexpr quad max() { return FLT128_MAX; }
  static quad infinity() { return HUGE_VALQ; }
  static constexpr quad euler_gamma() { return 0.577215664901532860606512090082402431Q; }
};

}  // namespace num
}  // namespace noma
