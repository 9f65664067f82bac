// Exact outage probabilities.
//
// U2 and the closed-form parts of U1 are sums of Gamma CDF masses. The two
// non-elementary integrals are
//   Y3  = int_{tau3*}^{beta1} f2(x) F0(g1/(phi2 P_S x)) dx          (relay link, linear EH)
//   X21 = int_0^{theta1} F0(sigma2/(eta P_th) (g1 - g11(y))) f1(y) dy (relay link, saturated EH)
// and with the direct link a third term chi1 couples Y3 with the direct path.
//
// Expansion A writes Y3 and X21 as a CDF mass minus an incomplete-gamma
// double series obtained by expanding the exponential of the Gamma density
// (the textbook form); it cancels catastrophically when the integration
// range is wide compared to the density scale (low SNR). Expansion B expands
// the F0 CDF in its own Taylor series instead, so no leading mass is
// subtracted. Both run in binary128; a result is accepted only when the accumulated term
// magnitude times the working epsilon stays below the requested accuracy,
// otherwise the next expansion (and finally adaptive quadrature) is tried.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "noma/model.hpp"

namespace noma {

enum class SeriesForm {
  /// Y3 = mass - S, X21 = F1(theta1) - S, chi1 evaluated, chi3 a product.
  Repaired,
  /// Y3 = mass * S, X21 = F0(theta1) - S, chi1 = 0, chi3 = F2 - F1,
  /// chi4 over (beta2, beta3). Kept only to measure how far it is off.
  Printed,
};

enum class Expansion { None, SeriesA, SeriesB, Quadrature };

std::string to_string(Expansion e);

struct SeriesOptions {
  double rel_tol = 1e-10;
  std::size_t max_terms = 200;
  SeriesForm form = SeriesForm::Repaired;
  /// Relative accuracy a series result must provably reach to be accepted.
  double accept_rel = 1e-9;
  /// Try expansion A before B.
  bool prefer_a = true;
  /// Fall back to quadrature when no expansion is accepted.
  bool allow_fallback = true;
};

struct Component {
  std::string name;
  double value = 0;
  Expansion expansion = Expansion::None;
  std::size_t terms = 0;
  bool converged = true;
};

struct SeriesReport {
  /// Clamped to [0, 1].
  double value = 0;
  double raw_value = 0;
  std::size_t u3_terms = 0;
  std::size_t x21_terms = 0;
  /// Every series that contributed converged and passed the accuracy check.
  bool converged = true;
  /// Some integral came from quadrature instead of a series.
  bool fallback = false;
  /// Least analytic method used (A < B < Quadrature).
  Expansion expansion = Expansion::None;
  std::vector<Component> components;
};

double op_u2_exact(const SystemParams& params);

SeriesReport op_u1_exact_nodirect(const SystemParams& params, const SeriesOptions& opts = {});
SeriesReport op_u1_exact_direct(const SystemParams& params, const SeriesOptions& opts = {});

/// Dispatches on params.scenario.
SeriesReport op_u1_exact(const SystemParams& params, const SeriesOptions& opts = {});

struct QuadratureOptions {
  double rel_tol = 1e-11;
  /// Accepted absolute error floor for integrals that are essentially 0.
  double abs_tol = 1e-300;
  unsigned max_depth = 15;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  /// Error estimate reached when the refinement gave up.
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// U1 outage with every integral done by adaptive Gauss-Kronrod quadrature
/// of the defining integrand, independent of the series code.
double op_u1_quadrature_oracle(const SystemParams& params, Scenario scenario,
                               const QuadratureOptions& opts = {});

// Individual integrals, exposed for testing.

struct IntegralResult {
  double value = 0;
  std::size_t terms = 0;
  bool converged = false;
  /// Converged and provably accurate to accept_rel.
  bool accepted = false;
  /// Bound on the rounding error of the accumulated series.
  double error_bound = 0;
};

/// Y3 by one specific expansion (SeriesA or SeriesB); no fallback.
IntegralResult upsilon3_series(const SystemParams& params, Expansion expansion,
                               const SeriesOptions& opts = {});
/// X21 by one specific expansion; no fallback.
IntegralResult x21_series(const SystemParams& params, Expansion expansion,
                          const SeriesOptions& opts = {});

double upsilon3_quadrature(const SystemParams& params, const QuadratureOptions& opts = {});
double x21_quadrature(const SystemParams& params, const QuadratureOptions& opts = {});
/// chi1 as a nested two-dimensional quadrature.
double chi1_quadrature(const SystemParams& params, const QuadratureOptions& opts = {});

}  // namespace noma
