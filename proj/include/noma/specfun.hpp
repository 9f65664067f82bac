// Special functions used by the closed-form outage expressions.
//
// Every routine is a pure function of its arguments and is safe to call from
// any number of threads. Templates are explicitly instantiated for double and
// noma::quad in specfun.cpp.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "noma/real.hpp"

namespace noma::specfun {

/// Thrown when an argument lies outside a function's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when a series produces a non-finite term; `index()` is the term index p.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::size_t index)
      : std::runtime_error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// ln Gamma(x) for x > 0.
template <class Real>
Real log_gamma(Real x);
template <>
double log_gamma<double>(double x);
template <>
quad log_gamma<quad>(quad x);

/// Upper incomplete gamma Gamma(s, x) = int_x^inf t^(s-1) e^-t dt for any
/// finite real s and x > 0. Shapes s <= 0 are reached by downward recurrence
/// from s - floor(s); Gamma(0, x) is the exponential integral E1(x).
template <class Real>
Real upper_inc_gamma(Real s, Real x);

/// Regularized lower incomplete gamma P(s, x), s > 0, x >= 0.
template <class Real>
Real gamma_p(Real s, Real x);

/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x), s > 0, x >= 0.
template <class Real>
Real gamma_q(Real s, Real x);

/// CDF of Gamma(shape, scale) at x >= 0; x = +inf gives 1.
template <class Real>
Real gamma_cdf(Real shape, Real scale, Real x);

/// Survival function 1 - CDF, computed without cancellation.
template <class Real>
Real gamma_ccdf(Real shape, Real scale, Real x);

template <class Real>
Real gamma_pdf(Real shape, Real scale, Real x);

inline double log_gamma(double x) { return log_gamma<double>(x); }
inline double upper_inc_gamma(double s, double x) { return upper_inc_gamma<double>(s, x); }
inline double gamma_cdf(double shape, double scale, double x) {
  return gamma_cdf<double>(shape, scale, x);
}
inline double gamma_ccdf(double shape, double scale, double x) {
  return gamma_ccdf<double>(shape, scale, x);
}
inline double gamma_pdf(double shape, double scale, double x) {
  return gamma_pdf<double>(shape, scale, x);
}

// ---------------------------------------------------------------------------
// Convergent-series accumulation

struct SeriesPolicy {
  double rel_tol = 1e-12;
  std::size_t max_terms = 200;
  /// Number of consecutive terms that must satisfy |t_p| <= rel_tol*|sum|.
  std::size_t window = 3;
};

template <class Real>
struct BasicSeriesOutcome {
  /// Partial sum actually accumulated, also when not converged.
  Real value = 0;
  std::size_t terms_used = 0;
  bool converged = false;
  /// Sum of |t_p|; bounds the rounding error of the alternating sums.
  Real abs_sum = 0;
};

using SeriesOutcome = BasicSeriesOutcome<double>;

/// Accumulates term(p) for p = 0, 1, ... with Neumaier-compensated summation
/// until the tail is negligible or policy.max_terms terms were consumed.
template <class Real, class Term>
BasicSeriesOutcome<Real> sum_series(Term&& term, const SeriesPolicy& policy) {
  if (!(policy.rel_tol > 0)) throw DomainError("sum_series: rel_tol must be positive");
  if (policy.max_terms < 1) throw DomainError("sum_series: max_terms must be >= 1");
  BasicSeriesOutcome<Real> out;
  Real sum = 0;
  Real comp = 0;
  std::size_t quiet = 0;
  const Real tol = static_cast<Real>(policy.rel_tol);
  for (std::size_t p = 0; p < policy.max_terms; ++p) {
    const Real t = static_cast<Real>(term(p));
    if (!num::isfinite(t)) {
      throw NumericError("sum_series: non-finite term at p = " + std::to_string(p), p);
    }
    const Real next = sum + t;
    if (num::abs(sum) >= num::abs(t)) {
      comp += (sum - next) + t;
    } else {
      comp += (t - next) + sum;
    }
    sum = next;
    out.abs_sum += num::abs(t);
    out.terms_used = p + 1;
    if (num::abs(t) <= tol * num::abs(sum + comp)) {
      if (++quiet >= policy.window) {
        out.converged = true;
        break;
      }
    } else {
      quiet = 0;
    }
  }
  out.value = sum + comp;
  return out;
}

}  // namespace noma::specfun
