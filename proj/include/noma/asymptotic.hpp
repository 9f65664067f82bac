// High-SNR behaviour of the outage probabilities.
//
// Every CDF whose argument shrinks like 1/p_s is replaced by its leading
// power law F(x) ~ (x/scale)^k / k!. Thresholds are carried in the
// p_s-normalised form x~ = p_s * x, which does not depend on p_s.
//
// The U2-to-U1 link CDF F0 is evaluated at an argument that does not shrink
// with p_s; it is still replaced by its power law, as in the textbook
// derivation. That substitution is accurate when the argument is small and
// makes the U1 asymptotes approximations rather than exact limits.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "noma/model.hpp"

namespace noma {

/// Leading power law of a Gamma(shape, scale) CDF near 0.
double gamma_cdf_asymptotic(int shape, double scale, double x);

struct AsymptoticTerm {
  std::string name;
  double coefficient = 0;
  /// The term is coefficient * p_s^snr_exponent.
  double snr_exponent = 0;
};

struct AsymptoticDecomposition {
  std::vector<AsymptoticTerm> terms;
  /// Exponent of the slowest-decaying term with a non-zero coefficient.
  double dominant_exponent = 0;
  /// m (2 - N); 0 selects the logarithmic relay-link term.
  int nu = 0;

  double value(double p_s) const;
};

/// U2: (m/omega2)^2m / (2m)! * (b1*~^2m + t1*~^2m - b1~^2m) * p_s^-2m when
/// beta1 > tau1*, otherwise the beta1* term alone.
double op_u2_asymptotic(const SystemParams& params);

/// U1 without the direct link. Terms:
///   A  = F2(tau2*)                     p_s^-2m
///   B  = F2(beta2) - F2(beta1), if >0  p_s^-2m
///   C  = F0(g1 sigma2 / (eta P_th))    p_s^0   (error floor)
///   D  = -C F2(beta3*)                 p_s^-2m
///   E  = relay-link integral, nu = 0   p_s^-mN
///   F  = relay-link integral, nu != 0  p_s^-2m
/// Requires a finite P_th and rho > 0 (throws InvalidParams otherwise).
AsymptoticDecomposition op_u1_asymptotic_nodirect(const SystemParams& params);

/// chi2 part of the direct-link asymptote: the saturated relay link in
/// parallel with a failed direct link, as the closed double sum.
double chi2_asymptotic(const SystemParams& params);

/// The same quantity by adaptive quadrature of its defining integrand.
double chi2_asymptotic_quadrature(const SystemParams& params);

/// U1 with the direct link: chi2 plus (F2(tau2*) + F2(beta2) - F2(beta1)) F1(theta1).
double op_u1_asymptotic_direct(const SystemParams& params);

/// Dispatches on params.scenario.
double op_u1_asymptotic(const SystemParams& params);

/// Negated least-squares slope of log10(op) against snr_db / 10 over the last
/// `window` points. Throws std::invalid_argument on fewer than 3 points, a
/// window below 2, non-increasing snr or a non-positive op in the window.
double diversity_order_fit(const std::vector<std::pair<double, double>>& curve, std::size_t window = 3);

}  // namespace noma
